#include "bellsim/policy.hpp"

#include <cmath>
#include <string>

#include "bellsim/errors.hpp"

namespace bellsim {

void SettingsPolicy::validate() const {
  if (pairs.empty()) throw InvalidPolicy("settings policy has no pairs");
  if (weights.size() != pairs.size()) {
    throw InvalidPolicy("settings policy has " + std::to_string(pairs.size()) +
                        " pairs but " + std::to_string(weights.size()) +
                        " weights");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidPolicy("settings policy weight is negative or non-finite");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidPolicy("settings policy weights sum to " +
                        std::to_string(sum) + ", expected 1");
  }
}

std::size_t SettingsPolicy::find_pair(const Direction& a, const Direction& b,
                                      double tol) const {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (same_direction(pairs[i].first, a, tol) &&
        same_direction(pairs[i].second, b, tol)) {
      return i;
    }
  }
  return npos;
}

namespace {
std::vector<Direction> distinct(const std::vector<Direction>& all, double tol) {
  std::vector<Direction> out;
  for (const auto& d : all) {
    bool seen = false;
    for (const auto& o : out) {
      if (same_direction(d, o, tol)) {
        seen = true;
        break;
      }
    }
    if (!seen) out.push_back(d);
  }
  return out;
}
}  // namespace

std::vector<Direction> SettingsPolicy::distinct_a(double tol) const {
  std::vector<Direction> all;
  all.reserve(pairs.size());
  for (const auto& p : pairs) all.push_back(p.first);
  return distinct(all, tol);
}

std::vector<Direction> SettingsPolicy::distinct_b(double tol) const {
  std::vector<Direction> all;
  all.reserve(pairs.size());
  for (const auto& p : pairs) all.push_back(p.second);
  return distinct(all, tol);
}

PaperDirections paper_directions() {
  const double s = std::sqrt(2.0) / 2.0;
  return PaperDirections{Direction(1, 0, 0), Direction(0, 1, 0),
                         Direction(s, s, 0), Direction(s, -s, 0)};
}

SettingsPolicy SettingsPolicy::paper() {
  const auto d = paper_directions();
  SettingsPolicy p;
  p.id = "paper";
  p.pairs = {{d.a, d.b}, {d.a, d.b_prime}, {d.a_prime, d.b},
             {d.a_prime, d.b_prime}};
  p.weights = {0.25, 0.25, 0.25, 0.25};
  return p;
}

SettingsPolicy SettingsPolicy::single(const Direction& a, const Direction& b) {
  SettingsPolicy p;
  p.id = "single";
  p.pairs = {{a, b}};
  p.weights = {1.0};
  return p;
}

}  // namespace bellsim
