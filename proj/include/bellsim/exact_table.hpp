#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bellsim/policy.hpp"

namespace bellsim {

// Exact joint distribution of one model under one settings policy, on a
// finite cell decomposition:
//
//   p[pair][lambda_cell][mu_a_cell][mu_b_cell][A][B]
//
// normalized to 1 per pair. Continuous models supply quotient partitions
// whose cells make the response functions constant (interval cuts at the
// response thresholds, azimuthal arcs, ...), so the table is exact, not a
// discretization error. Every exact expectation and exact audit is a
// marginalization of this object.
struct ExactJointTable {
  SettingsPolicy policy;
  std::size_t n_lambda = 1;
  std::size_t n_mu_a = 1;
  std::size_t n_mu_b = 1;
  std::vector<std::string> lambda_labels;  // optional, for witnesses
  std::vector<std::string> mu_a_labels;
  std::vector<std::string> mu_b_labels;
  std::vector<double> p;

  void allocate();  // resize p to pairs * n_lambda * n_mu_a * n_mu_b * 4

  double& at(std::size_t pair, std::size_t l, std::size_t ma, std::size_t mb,
             int ai, int bi);
  double at(std::size_t pair, std::size_t l, std::size_t ma, std::size_t mb,
            int ai, int bi) const;

  // Throws InvalidArgument if negative entries or any pair's mass is not 1
  // within tol.
  void validate(double tol = 1e-9) const;

  // E(a,b) for one policy pair: sum of A*B*p.
  double expectation(std::size_t pair) const;

  std::string lambda_label(std::size_t l) const;
  std::string mu_a_label(std::size_t m) const;
  std::string mu_b_label(std::size_t m) const;
};

}  // namespace bellsim
