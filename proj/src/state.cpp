#include "bellsim/state.hpp"

#include <cmath>

namespace bellsim {

namespace {

struct ContainsVisitor {
  const StatePayload& payload;
  double tol;

  bool operator()(const DiscreteDomain& d) const {
    const auto* ds = std::get_if<DiscreteState>(&payload);
    return ds != nullptr && ds->index < d.size;
  }

  bool operator()(const BoxDomain& d) const {
    const auto* cs = std::get_if<ContinuousState>(&payload);
    if (cs == nullptr || cs->values.size() != d.bounds.size()) return false;
    for (std::size_t i = 0; i < d.bounds.size(); ++i) {
      const double v = cs->values[i];
      if (!std::isfinite(v) || v < d.bounds[i].first - tol ||
          v > d.bounds[i].second + tol) {
        return false;
      }
    }
    return true;
  }

  bool operator()(const UnitSphereDomain&) const {
    const auto* cs = std::get_if<ContinuousState>(&payload);
    if (cs == nullptr || cs->values.size() != 3) return false;
    double n2 = 0.0;
    for (double v : cs->values) {
      if (!std::isfinite(v)) return false;
      n2 += v * v;
    }
    return std::abs(std::sqrt(n2) - 1.0) <= 1e-12;
  }
};

}  // namespace

bool domain_contains(const StateDomain& domain, const StatePayload& payload,
                     double tol) {
  return std::visit(ContainsVisitor{payload, tol}, domain);
}

}  // namespace bellsim
