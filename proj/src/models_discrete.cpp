#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellsim/models.hpp"
#include "models_internal.hpp"

namespace bellsim::models {

namespace {

using internal::cvals;
using internal::dindex;
using internal::direction_index;
using internal::unit_interval_cuts;

const std::vector<Direction>& dice_directions() {
  static const std::vector<Direction> dirs = {Direction(1, 0, 0),
                                              Direction(0, 1, 0)};
  return dirs;
}

std::size_t dice_setting_index(const Direction& d) {
  const std::size_t i = direction_index(dice_directions(), d);
  if (i == static_cast<std::size_t>(-1)) {
    throw ModelFailure("dice model: setting is not in the declared {x,y} set");
  }
  return i;
}

void validate_dice_weights(const std::vector<double>& weights) {
  if (weights.size() < 2) {
    throw InvalidWeights("dice model needs at least 2 weights");
  }
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw InvalidWeights("dice weights must lie in [0,1]");
    }
  }
  if (weights[0] == weights[1]) {
    throw InvalidWeights(
        "dice weights[0] and weights[1] must differ (equal dice make the "
        "microstate irrelevant)");
  }
}

// Side universes for the factorizable table family: A settings {a, a'},
// B settings {b, b'} of the canonical configuration.
struct FacUniverse {
  std::vector<Direction> a_dirs;
  std::vector<Direction> b_dirs;
};

const FacUniverse& fac_universe() {
  static const FacUniverse u = [] {
    const auto d = paper_directions();
    return FacUniverse{{d.a, d.a_prime}, {d.b, d.b_prime}};
  }();
  return u;
}

std::size_t fac_index(const std::vector<Direction>& dirs, const Direction& d,
                      const char* side) {
  const std::size_t i = direction_index(dirs, d);
  if (i == static_cast<std::size_t>(-1)) {
    throw ModelFailure(std::string("factorizable model: ") + side +
                       " setting is outside the declared set");
  }
  return i;
}

void validate_prob_table(const std::vector<std::vector<double>>& t,
                         std::size_t n_settings, std::size_t k,
                         const char* name) {
  if (t.size() != n_settings) {
    throw InvalidArgument(std::string(name) + ": need one row per setting");
  }
  for (const auto& row : t) {
    if (row.size() != k) {
      throw InvalidArgument(std::string(name) + ": row size != k_lambda");
    }
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument(std::string(name) + ": probability outside [0,1]");
      }
    }
  }
}

}  // namespace

SettingsPolicy dice_policy() {
  const auto& d = dice_directions();
  SettingsPolicy p;
  p.id = "dice-grid";
  p.pairs = {{d[0], d[0]}, {d[0], d[1]}, {d[1], d[0]}, {d[1], d[1]}};
  p.weights = {0.25, 0.25, 0.25, 0.25};
  return p;
}

ModelSpec build_weighted_dice_model(const std::vector<double>& weights) {
  validate_dice_weights(weights);

  std::string id = "dice:";
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (i) id += ',';
    // Trim to a compact decimal form.
    std::string w = std::to_string(weights[i]);
    w.erase(w.find_last_not_of('0') + 1);
    if (!w.empty() && w.back() == '.') w.pop_back();
    id += w;
  }

  ModelSpec m;
  m.id = id;
  m.lambda_domain = DiscreteDomain{2};
  m.mu_a_domain = BoxDomain{{{0, 1}}};
  m.mu_b_domain = BoxDomain{{{0, 1}}};
  m.sample_lambda = [](const Direction&, const Direction&, RngStream& rng) {
    return HiddenState{DiscreteState{rng.next_below(2)}};
  };
  m.sample_microstates = [](const Direction&, const Direction&,
                            const HiddenState&, RngStream& rng) {
    const double u = rng.next_unit();
    const double v = rng.next_unit();
    return std::make_pair(Microstate{ContinuousState{{u}}, Side::A},
                          Microstate{ContinuousState{{v}}, Side::B});
  };
  m.respond_a = [weights](const Direction& a, const HiddenState& lambda,
                          const Microstate& mu, RngStream&) {
    const std::size_t die = dindex(lambda.payload) ^ dice_setting_index(a);
    return Outcome(cvals(mu.payload)[0] < weights[die] ? +1 : -1);
  };
  m.respond_b = [weights](const Direction& b, const HiddenState& lambda,
                          const Microstate& mu, RngStream&) {
    const std::size_t die = dindex(lambda.payload) ^ dice_setting_index(b);
    return Outcome(cvals(mu.payload)[0] < weights[die] ? +1 : -1);
  };
  m.locality.respond_a_reads = {RespondInput::OwnSetting, RespondInput::Lambda,
                                RespondInput::OwnMicrostate};
  m.locality.respond_b_reads = {RespondInput::OwnSetting, RespondInput::Lambda,
                                RespondInput::OwnMicrostate};
  m.exact_E = [weights](const Direction& a, const Direction& b) {
    const std::size_t ia = dice_setting_index(a);
    const std::size_t ib = dice_setting_index(b);
    double e = 0.0;
    for (std::size_t l = 0; l < 2; ++l) {
      e += 0.5 * (2 * weights[l ^ ia] - 1) * (2 * weights[l ^ ib] - 1);
    }
    return e;
  };
  m.exact_table = [weights](const SettingsPolicy& policy)
      -> std::optional<ExactJointTable> {
    policy.validate();
    const std::vector<double> cuts =
        unit_interval_cuts({weights[0], weights[1]});
    const std::size_t n_int = cuts.size() - 1;

    ExactJointTable t;
    t.policy = policy;
    t.n_lambda = 2;
    t.n_mu_a = n_int;
    t.n_mu_b = n_int;
    t.lambda_labels = {"l=0", "l=1"};
    for (std::size_t j = 0; j < n_int; ++j) {
      t.mu_a_labels.push_back(internal::interval_label("u", cuts[j], cuts[j + 1]));
      t.mu_b_labels.push_back(internal::interval_label("v", cuts[j], cuts[j + 1]));
    }
    t.allocate();
    for (std::size_t pair = 0; pair < policy.size(); ++pair) {
      const std::size_t ia = dice_setting_index(policy.pairs[pair].first);
      const std::size_t ib = dice_setting_index(policy.pairs[pair].second);
      for (std::size_t l = 0; l < 2; ++l) {
        const double wa_thr = weights[l ^ ia];
        const double wb_thr = weights[l ^ ib];
        for (std::size_t ja = 0; ja < n_int; ++ja) {
          const int A = cuts[ja + 1] <= wa_thr + 1e-15 ? +1 : -1;
          for (std::size_t jb = 0; jb < n_int; ++jb) {
            const int B = cuts[jb + 1] <= wb_thr + 1e-15 ? +1 : -1;
            t.at(pair, l, ja, jb, A > 0 ? 1 : 0, B > 0 ? 1 : 0) +=
                0.5 * (cuts[ja + 1] - cuts[ja]) * (cuts[jb + 1] - cuts[jb]);
          }
        }
      }
    }
    t.validate();
    return t;
  };
  return m;
}

ModelSpec build_factorizable_table_model(
    const std::string& id, const std::vector<double>& rho,
    const std::vector<std::vector<double>>& p_a,
    const std::vector<std::vector<double>>& p_b) {
  const std::size_t k = rho.size();
  if (k == 0) throw InvalidArgument("factorizable model: k_lambda must be >= 1");
  double sum = 0.0;
  for (double r : rho) {
    if (!(r >= 0.0)) throw InvalidArgument("factorizable model: rho < 0");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidArgument("factorizable model: rho does not sum to 1");
  }
  validate_prob_table(p_a, 2, k, "p_a");
  validate_prob_table(p_b, 2, k, "p_b");

  ModelSpec m;
  m.id = id;
  m.lambda_domain = DiscreteDomain{k};
  m.sample_lambda = [rho](const Direction&, const Direction&, RngStream& rng) {
    double u = rng.next_unit();
    std::uint64_t pick = rho.size() - 1;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (u < rho[i]) {
        pick = i;
        break;
      }
      u -= rho[i];
    }
    return HiddenState{DiscreteState{pick}};
  };
  m.sample_microstates = [](const Direction&, const Direction&,
                            const HiddenState&, RngStream&) {
    return std::make_pair(Microstate{trivial_state(), Side::A},
                          Microstate{trivial_state(), Side::B});
  };
  m.respond_a = [p_a](const Direction& a, const HiddenState& lambda,
                      const Microstate&, RngStream& rng) {
    const std::size_t ia = fac_index(fac_universe().a_dirs, a, "A");
    return Outcome(rng.next_unit() < p_a[ia][dindex(lambda.payload)] ? +1 : -1);
  };
  m.respond_b = [p_b](const Direction& b, const HiddenState& lambda,
                      const Microstate&, RngStream& rng) {
    const std::size_t ib = fac_index(fac_universe().b_dirs, b, "B");
    return Outcome(rng.next_unit() < p_b[ib][dindex(lambda.payload)] ? +1 : -1);
  };
  m.locality.respond_a_reads = {RespondInput::OwnSetting, RespondInput::Lambda,
                                RespondInput::OwnRng};
  m.locality.respond_b_reads = {RespondInput::OwnSetting, RespondInput::Lambda,
                                RespondInput::OwnRng};
  m.exact_E = [rho, p_a, p_b](const Direction& a, const Direction& b) {
    const std::size_t ia = fac_index(fac_universe().a_dirs, a, "A");
    const std::size_t ib = fac_index(fac_universe().b_dirs, b, "B");
    double e = 0.0;
    for (std::size_t l = 0; l < rho.size(); ++l) {
      e += rho[l] * (2 * p_a[ia][l] - 1) * (2 * p_b[ib][l] - 1);
    }
    return e;
  };
  m.exact_table = [rho, p_a, p_b](const SettingsPolicy& policy)
      -> std::optional<ExactJointTable> {
    policy.validate();
    ExactJointTable t;
    t.policy = policy;
    t.n_lambda = rho.size();
    t.allocate();
    for (std::size_t pair = 0; pair < policy.size(); ++pair) {
      const std::size_t ia =
          fac_index(fac_universe().a_dirs, policy.pairs[pair].first, "A");
      const std::size_t ib =
          fac_index(fac_universe().b_dirs, policy.pairs[pair].second, "B");
      for (std::size_t l = 0; l < rho.size(); ++l) {
        const double pa = p_a[ia][l];
        const double pb = p_b[ib][l];
        t.at(pair, l, 0, 0, 1, 1) = rho[l] * pa * pb;
        t.at(pair, l, 0, 0, 1, 0) = rho[l] * pa * (1 - pb);
        t.at(pair, l, 0, 0, 0, 1) = rho[l] * (1 - pa) * pb;
        t.at(pair, l, 0, 0, 0, 0) = rho[l] * (1 - pa) * (1 - pb);
      }
    }
    t.validate();
    return t;
  };
  return m;
}

ModelSpec build_random_factorizable_model(std::size_t k_lambda,
                                          std::uint64_t seed) {
  if (k_lambda == 0) {
    throw InvalidArgument("random factorizable model: k_lambda must be >= 1");
  }
  RngStream rho_rng = derive_rng_stream(seed, 0, Stage::Lambda);
  std::vector<double> rho(k_lambda);
  double sum = 0.0;
  for (double& r : rho) {
    r = rho_rng.next_unit() + 1e-12;
    sum += r;
  }
  for (double& r : rho) r /= sum;
  // Re-normalize exactly enough for validation.
  double s2 = 0.0;
  for (std::size_t i = 0; i + 1 < rho.size(); ++i) s2 += rho[i];
  rho.back() = 1.0 - s2;

  RngStream a_rng = derive_rng_stream(seed, 0, Stage::RespondA);
  RngStream b_rng = derive_rng_stream(seed, 0, Stage::RespondB);
  std::vector<std::vector<double>> p_a(2, std::vector<double>(k_lambda));
  std::vector<std::vector<double>> p_b(2, std::vector<double>(k_lambda));
  for (auto& row : p_a) {
    for (double& p : row) p = a_rng.next_unit();
  }
  for (auto& row : p_b) {
    for (double& p : row) p = b_rng.next_unit();
  }
  return build_factorizable_table_model(
      "randfac:" + std::to_string(k_lambda) + ":" + std::to_string(seed), rho,
      p_a, p_b);
}

}  // namespace bellsim::models
