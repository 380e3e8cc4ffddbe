#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bellsim/model_spec.hpp"
#include "bellsim/state.hpp"

namespace bellsim {

// Maps recorded hidden/microstate payloads onto a finite cell index so that
// empirical audits can condition on them.
//
//  - DiscreteDomain: one cell per index.
//  - BoxDomain: a regular grid, bins_per_dim cells along each axis.
//  - UnitSphereDomain: equal-area cells, bins_per_dim bands in z times
//    bins_per_dim sectors in azimuth.
class Binner {
 public:
  Binner(const StateDomain& domain, unsigned bins_per_dim);

  std::size_t n_cells() const { return n_cells_; }
  // Throws UndiscretizableState if the payload does not fit the domain.
  std::size_t cell_of(const StatePayload& payload) const;
  std::string label(std::size_t cell) const;

 private:
  enum class Kind { Discrete, Box, Sphere };
  Kind kind_;
  unsigned bins_ = 1;
  std::size_t n_cells_ = 1;
  std::vector<std::pair<double, double>> bounds_;  // Box only
};

struct StateDomains {
  StateDomain lambda;
  StateDomain mu_a;
  StateDomain mu_b;
};

StateDomains domains_of(const ModelSpec& model);

}  // namespace bellsim
