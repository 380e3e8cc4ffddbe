#include <cmath>
#include <numbers>
#include <optional>

#include "bellsim/models.hpp"
#include "models_internal.hpp"

namespace bellsim::models {

namespace {

using internal::cvals;

constexpr double kPi = std::numbers::pi;

std::pair<Microstate, Microstate> trivial_microstates(const Direction&,
                                                      const Direction&,
                                                      const HiddenState&,
                                                      RngStream&) {
  return {Microstate{trivial_state(), Side::A},
          Microstate{trivial_state(), Side::B}};
}

HiddenState trivial_lambda(const Direction&, const Direction&, RngStream&) {
  return HiddenState{trivial_state()};
}

std::optional<ExactJointTable> singlet_table(const SettingsPolicy& policy) {
  policy.validate();
  ExactJointTable t;
  t.policy = policy;
  t.allocate();
  for (std::size_t pair = 0; pair < policy.size(); ++pair) {
    const double ct =
        std::cos(angle_between(policy.pairs[pair].first, policy.pairs[pair].second));
    for (int ai = 0; ai < 2; ++ai) {
      for (int bi = 0; bi < 2; ++bi) {
        const int prod = (ai == bi) ? +1 : -1;
        t.at(pair, 0, 0, 0, ai, bi) = (1.0 - prod * ct) / 4.0;
      }
    }
  }
  t.validate();
  return t;
}

// Azimuthal arc partition for coplanar settings: within one arc every
// sign(d . lambda) is constant, so the continuous sphere quotients to a
// finite, exact lambda decomposition. Returns nullopt if any direction
// leaves the z=0 plane.
struct ArcPartition {
  std::vector<double> lo;  // arc start, in [0, 2pi)
  std::vector<double> width;
};

std::optional<ArcPartition> arc_partition(const SettingsPolicy& policy) {
  std::vector<Direction> dirs;
  for (const auto& [a, b] : policy.pairs) {
    if (std::abs(a.z()) > 1e-12 || std::abs(b.z()) > 1e-12) return std::nullopt;
    dirs.push_back(a);
    dirs.push_back(b);
  }
  std::vector<double> bounds;
  for (const auto& d : dirs) {
    const double alpha = std::atan2(d.y(), d.x());
    for (double beta : {alpha + kPi / 2, alpha - kPi / 2}) {
      double w = std::fmod(beta, 2 * kPi);
      if (w < 0) w += 2 * kPi;
      if (w >= 2 * kPi) w -= 2 * kPi;
      bounds.push_back(w);
    }
  }
  std::sort(bounds.begin(), bounds.end());
  std::vector<double> uniq;
  for (double b : bounds) {
    if (uniq.empty() || b - uniq.back() > 1e-12) uniq.push_back(b);
  }
  // Wrap-around duplicate (0 vs 2pi).
  if (uniq.size() > 1 && (uniq.front() + 2 * kPi) - uniq.back() <= 1e-12) {
    uniq.pop_back();
  }
  ArcPartition part;
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    const double next = (i + 1 < uniq.size()) ? uniq[i + 1] : uniq.front() + 2 * kPi;
    part.lo.push_back(uniq[i]);
    part.width.push_back(next - uniq[i]);
  }
  return part;
}

std::optional<ExactJointTable> sign_table(const SettingsPolicy& policy) {
  policy.validate();
  const auto part = arc_partition(policy);
  if (!part) return std::nullopt;

  ExactJointTable t;
  t.policy = policy;
  t.n_lambda = part->lo.size();
  t.allocate();
  for (std::size_t l = 0; l < part->lo.size(); ++l) {
    const double mid = part->lo[l] + part->width[l] / 2;
    const Direction lambda = Direction::from_azimuth(mid);
    const double w = part->width[l] / (2 * kPi);
    t.lambda_labels.push_back(internal::interval_label("phi", part->lo[l],
                                                       part->lo[l] + part->width[l]));
    for (std::size_t pair = 0; pair < policy.size(); ++pair) {
      const int A = sign_pm(dot(policy.pairs[pair].first, lambda));
      const int B = -sign_pm(dot(policy.pairs[pair].second, lambda));
      t.at(pair, l, 0, 0, A > 0 ? 1 : 0, B > 0 ? 1 : 0) += w;
    }
  }
  t.validate();
  return t;
}

}  // namespace

ModelSpec build_singlet_oracle() {
  ModelSpec m;
  m.id = "singlet";
  m.sample_lambda = trivial_lambda;
  m.sample_microstates = trivial_microstates;
  m.respond_joint = [](const Direction& a, const Direction& b,
                       const HiddenState&, const Microstate&, const Microstate&,
                       RngStream& rng) {
    // P(A != B) = cos^2(theta/2) with unbiased marginals gives E = -cos theta.
    const double c = (1.0 + std::cos(angle_between(a, b))) / 2.0;
    const int A = rng.next_unit() < 0.5 ? +1 : -1;
    const int B = rng.next_unit() < c ? -A : +A;
    return std::make_pair(Outcome(A), Outcome(B));
  };
  m.locality.respond_a_reads = {RespondInput::OwnSetting,
                                RespondInput::RemoteSetting,
                                RespondInput::SharedRng};
  m.locality.respond_b_reads = {RespondInput::OwnSetting,
                                RespondInput::RemoteSetting,
                                RespondInput::SharedRng};
  m.exact_E = [](const Direction& a, const Direction& b) {
    return -std::cos(angle_between(a, b));
  };
  m.exact_table = singlet_table;
  return m;
}

ModelSpec build_sign_model() {
  ModelSpec m;
  m.id = "sign";
  m.lambda_domain = UnitSphereDomain{};
  m.sample_lambda = [](const Direction&, const Direction&, RngStream& rng) {
    const double z = rng.next_range(-1.0, 1.0);
    const double phi = rng.next_range(-kPi, kPi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return HiddenState{
        ContinuousState{{r * std::cos(phi), r * std::sin(phi), z}}};
  };
  m.sample_microstates = trivial_microstates;
  m.respond_a = [](const Direction& a, const HiddenState& lambda,
                   const Microstate&, RngStream&) {
    const auto& v = cvals(lambda.payload);
    return Outcome(sign_pm(a.x() * v[0] + a.y() * v[1] + a.z() * v[2]));
  };
  m.respond_b = [](const Direction& b, const HiddenState& lambda,
                   const Microstate&, RngStream&) {
    const auto& v = cvals(lambda.payload);
    return Outcome(-sign_pm(b.x() * v[0] + b.y() * v[1] + b.z() * v[2]));
  };
  m.locality.respond_a_reads = {RespondInput::OwnSetting, RespondInput::Lambda};
  m.locality.respond_b_reads = {RespondInput::OwnSetting, RespondInput::Lambda};
  m.exact_E = [](const Direction& a, const Direction& b) {
    return -1.0 + 2.0 * angle_between(a, b) / kPi;
  };
  m.exact_table = sign_table;
  return m;
}

}  // namespace bellsim::models
