#pragma once

#include <cstdint>
#include <vector>

#include "bellsim/ensemble.hpp"
#include "bellsim/model_spec.hpp"
#include "bellsim/policy.hpp"

namespace bellsim {

enum class Method { Exact, MonteCarlo };

struct ExpectationEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 in exact mode
  std::uint64_t n = 0;     // matched runs; 0 in exact mode
  Method method = Method::Exact;
};

// E(a,b) from a registered closed form or the model's exact table.
// Throws NoExactInterface if the model has neither.
ExpectationEstimate exact_expectation(const ModelSpec& model, const Direction& a,
                                      const Direction& b);

// Sample mean of A*B over runs whose settings match (a,b) within match_tol
// per component. Throws InsufficientRuns when fewer than 2 runs match.
ExpectationEstimate mc_expectation(const Ensemble& ensemble, const Direction& a,
                                   const Direction& b, double match_tol = 1e-9);

struct ChshReport {
  ExpectationEstimate e_ab;
  ExpectationEstimate e_abp;
  ExpectationEstimate e_apb;
  ExpectationEstimate e_apbp;
  double statistic = 0.0;  // |E(a,b) + E(a,b') + E(a',b) - E(a',b')|
  double std_error = 0.0;  // sqrt of summed term variances
  Method method = Method::Exact;
};

ChshReport chsh_statistic(const ModelSpec& model, const Direction& a,
                          const Direction& a_prime, const Direction& b,
                          const Direction& b_prime);
ChshReport chsh_statistic(const Ensemble& ensemble, const Direction& a,
                          const Direction& a_prime, const Direction& b,
                          const Direction& b_prime);

ChshReport chsh_statistic(const ModelSpec& model, const PaperDirections& dirs);
ChshReport chsh_statistic(const Ensemble& ensemble, const PaperDirections& dirs);

// The canonical maximally-violating configuration.
PaperDirections paper_configuration();

// Angle sweep with a = (1,0,0) and b in-plane at theta: exact E plus a Monte
// Carlo estimate of n runs per point (common master seed across points).
struct SweepRow {
  double theta = 0.0;  // radians
  double e_exact = 0.0;
  double e_mc = 0.0;
  double std_error = 0.0;
};
std::vector<SweepRow> sweep_expectation(const ModelSpec& model,
                                        const std::vector<double>& thetas,
                                        std::uint64_t n_runs,
                                        std::uint64_t master_seed);

}  // namespace bellsim
