#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bellsim/direction.hpp"

namespace bellsim {

// The coplanar configuration that maximizes the CHSH statistic:
// a=(1,0,0), a'=(0,1,0), b=(s,s,0), b'=(s,-s,0) with s = sqrt(2)/2.
struct PaperDirections {
  Direction a;
  Direction a_prime;
  Direction b;
  Direction b_prime;
};
PaperDirections paper_directions();

// Distribution over joint setting pairs (a, b).
struct SettingsPolicy {
  std::string id;
  std::vector<std::pair<Direction, Direction>> pairs;
  std::vector<double> weights;  // nonnegative, sum to 1 within 1e-12

  // Throws InvalidPolicy on violation.
  void validate() const;

  std::size_t size() const { return pairs.size(); }

  // Index of the pair matching (a, b) within tol per component, or npos.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t find_pair(const Direction& a, const Direction& b,
                        double tol = 1e-9) const;

  // Distinct side-1 / side-2 directions, in first-appearance order.
  std::vector<Direction> distinct_a(double tol = 1e-9) const;
  std::vector<Direction> distinct_b(double tol = 1e-9) const;

  // The four coplanar pairs used by the maximally-violating configuration,
  // uniform weights: a=(1,0,0), a'=(0,1,0), b=(s,s,0), b'=(s,-s,0), s=sqrt(2)/2.
  static SettingsPolicy paper();
  // Single-pair policy, weight 1.
  static SettingsPolicy single(const Direction& a, const Direction& b);
};

}  // namespace bellsim
