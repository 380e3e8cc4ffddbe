#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bellsim/direction.hpp"
#include "bellsim/outcome.hpp"
#include "bellsim/policy.hpp"
#include "bellsim/state.hpp"

namespace bellsim {

// One completed run. The full hidden state and both microstates are recorded;
// the audit engine has no other window into the model.
struct RunRecord {
  std::uint64_t run_index = 0;
  Direction setting_a{1, 0, 0};
  Direction setting_b{1, 0, 0};
  Outcome outcome_a{+1};
  Outcome outcome_b{+1};
  HiddenState lambda;
  Microstate mu_a;
  Microstate mu_b;
};

struct Ensemble {
  std::string model_id;
  std::string settings_policy_id;
  std::uint64_t master_seed = 0;
  SettingsPolicy policy;  // retained so audits can group by pair
  std::vector<RunRecord> runs;
};

}  // namespace bellsim
