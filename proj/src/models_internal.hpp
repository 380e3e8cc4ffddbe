#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bellsim/direction.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/state.hpp"

namespace bellsim::models::internal {

inline const std::vector<double>& cvals(const StatePayload& payload) {
  const auto* c = std::get_if<ContinuousState>(&payload);
  if (c == nullptr) throw ModelFailure("expected a continuous state payload");
  return c->values;
}

inline std::uint64_t dindex(const StatePayload& payload) {
  const auto* d = std::get_if<DiscreteState>(&payload);
  if (d == nullptr) throw ModelFailure("expected a discrete state payload");
  return d->index;
}

// Sorted unique cut points over [0,1] including both ends.
inline std::vector<double> unit_interval_cuts(std::vector<double> thresholds) {
  thresholds.push_back(0.0);
  thresholds.push_back(1.0);
  for (double& t : thresholds) t = std::clamp(t, 0.0, 1.0);
  std::sort(thresholds.begin(), thresholds.end());
  std::vector<double> cuts;
  for (double t : thresholds) {
    if (cuts.empty() || t - cuts.back() > 1e-15) cuts.push_back(t);
  }
  return cuts;
}

inline std::size_t direction_index(const std::vector<Direction>& dirs,
                                   const Direction& d, double tol = 1e-9) {
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (same_direction(dirs[i], d, tol)) return i;
  }
  return static_cast<std::size_t>(-1);
}

inline std::string interval_label(const std::string& var, double lo, double hi) {
  return var + "[" + std::to_string(lo) + "," + std::to_string(hi) + ")";
}

}  // namespace bellsim::models::internal
