#pragma once

#include <cstdint>

#include "bellsim/ensemble.hpp"
#include "bellsim/model_spec.hpp"
#include "bellsim/policy.hpp"

namespace bellsim {

// Generate n_runs records. Per-run streams are derived from
// (master_seed, run_index, stage), so the output is bit-identical for any
// thread count; runs are always emitted ordered by run_index.
//
// Throws InvalidArgument (n_runs == 0), InvalidPolicy, or ModelFailure (a
// sampler left its declared domain or a responder returned garbage).
Ensemble run_experiment(const ModelSpec& model, const SettingsPolicy& policy,
                        std::uint64_t n_runs, std::uint64_t master_seed,
                        unsigned n_threads = 1);

}  // namespace bellsim
