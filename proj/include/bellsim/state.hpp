#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

namespace bellsim {

// ---------------------------------------------------------------------------
// State payloads
// ---------------------------------------------------------------------------

struct DiscreteState {
  std::uint64_t index = 0;
  bool operator==(const DiscreteState&) const = default;
};

struct ContinuousState {
  std::vector<double> values;
  bool operator==(const ContinuousState&) const = default;
};

using StatePayload = std::variant<DiscreteState, ContinuousState>;

enum class Side { A, B };

// Hidden state of the pair, drawn once per run.
struct HiddenState {
  StatePayload payload;
  bool operator==(const HiddenState&) const = default;
};

// Per-side microstate, drawn after the hidden state. The side tag is carried
// so records cannot mix the two up.
struct Microstate {
  StatePayload payload;
  Side side = Side::A;
  bool operator==(const Microstate& o) const {
    return side == o.side && payload == o.payload;
  }
};

// ---------------------------------------------------------------------------
// Declared domains
// ---------------------------------------------------------------------------

struct DiscreteDomain {
  std::uint64_t size = 1;
};

// Axis-aligned box; one (lo, hi) pair per component.
struct BoxDomain {
  std::vector<std::pair<double, double>> bounds;
};

// Unit vectors in R^3 (norm validated to 1e-12). Binned equal-area in
// (z, azimuth) rather than on a volume grid.
struct UnitSphereDomain {};

using StateDomain = std::variant<DiscreteDomain, BoxDomain, UnitSphereDomain>;

inline StateDomain trivial_domain() { return DiscreteDomain{1}; }
inline StatePayload trivial_state() { return DiscreteState{0}; }

// Does the payload lie inside the domain (box bounds padded by tol)?
bool domain_contains(const StateDomain& domain, const StatePayload& payload,
                     double tol = 1e-12);

}  // namespace bellsim
