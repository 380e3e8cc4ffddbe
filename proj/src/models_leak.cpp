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
using internal::direction_index;
using internal::unit_interval_cuts;

// P(A = -B_hat) threshold for one pair: cos^2(theta/2).
double flip_threshold(const Direction& a, const Direction& b) {
  return (1.0 + std::cos(angle_between(a, b))) / 2.0;
}

Direction decode_direction(const StatePayload& payload) {
  const auto& v = cvals(payload);
  if (v.size() != 3) throw ModelFailure("microstate does not encode a direction");
  try {
    return Direction(v[0], v[1], v[2]);
  } catch (const InvalidArgument&) {
    throw ModelFailure("microstate does not encode a unit direction");
  }
}

Outcome leak_respond_b(const Direction&, const HiddenState& lambda,
                       const Microstate&, RngStream&) {
  // Fair coin from u1 alone; the setting is ignored.
  return Outcome(cvals(lambda.payload)[0] < 0.5 ? +1 : -1);
}

Outcome leak_respond_a(const Direction& a, const HiddenState& lambda,
                       const Microstate& mu_a, RngStream&) {
  const auto& u = cvals(lambda.payload);
  const Direction remote = decode_direction(mu_a.payload);
  const int b_hat = u[0] < 0.5 ? +1 : -1;  // recomputed from lambda
  return Outcome(u[1] < flip_threshold(a, remote) ? -b_hat : +b_hat);
}

// Distinct side-2 directions of a policy with their aggregated weights.
struct BMarginal {
  std::vector<Direction> dirs;
  std::vector<double> weights;
};

BMarginal b_marginal(const SettingsPolicy& policy) {
  BMarginal m;
  m.dirs = policy.distinct_b();
  m.weights.assign(m.dirs.size(), 0.0);
  for (std::size_t i = 0; i < policy.size(); ++i) {
    m.weights[direction_index(m.dirs, policy.pairs[i].second)] +=
        policy.weights[i];
  }
  return m;
}

// Exact quotient table: u1 halves x u2 intervals cut at every flip threshold
// that can occur, with mu_a ranging over the possible remote-setting
// encodings. Within each cell both responses are constant.
ExactJointTable leak_style_table(const SettingsPolicy& policy,
                                 const BMarginal& mu_dist,
                                 bool mu_follows_pair) {
  policy.validate();
  std::vector<double> thresholds;
  if (mu_follows_pair) {
    for (const auto& [a, b] : policy.pairs) {
      thresholds.push_back(flip_threshold(a, b));
    }
  } else {
    for (const auto& a : policy.distinct_a()) {
      for (const auto& bt : mu_dist.dirs) {
        thresholds.push_back(flip_threshold(a, bt));
      }
    }
  }
  const std::vector<double> cuts = unit_interval_cuts(std::move(thresholds));
  const std::size_t n_int = cuts.size() - 1;

  ExactJointTable t;
  t.policy = policy;
  t.n_lambda = 2 * n_int;
  t.n_mu_a = mu_dist.dirs.size();
  t.allocate();
  for (std::size_t half = 0; half < 2; ++half) {
    for (std::size_t j = 0; j < n_int; ++j) {
      t.lambda_labels.push_back(
          std::string(half == 0 ? "u1<.5|" : "u1>=.5|") +
          internal::interval_label("u2", cuts[j], cuts[j + 1]));
    }
  }

  for (std::size_t pair = 0; pair < policy.size(); ++pair) {
    const Direction& a = policy.pairs[pair].first;
    for (std::size_t mi = 0; mi < mu_dist.dirs.size(); ++mi) {
      double mu_w;
      if (mu_follows_pair) {
        // mu_a is a point mass at the actual remote setting.
        if (direction_index(mu_dist.dirs, policy.pairs[pair].second) != mi) {
          continue;
        }
        mu_w = 1.0;
      } else {
        mu_w = mu_dist.weights[mi];
      }
      const double c = flip_threshold(a, mu_dist.dirs[mi]);
      for (std::size_t half = 0; half < 2; ++half) {
        const int B = half == 0 ? +1 : -1;
        for (std::size_t j = 0; j < n_int; ++j) {
          const double w = mu_w * 0.5 * (cuts[j + 1] - cuts[j]);
          const bool below = cuts[j + 1] <= c + 1e-15;
          const int A = below ? -B : +B;
          t.at(pair, half * n_int + j, mi, 0, A > 0 ? 1 : 0, B > 0 ? 1 : 0) += w;
        }
      }
    }
  }
  t.validate();
  return t;
}

HiddenState unit_square_lambda(const Direction&, const Direction&,
                               RngStream& rng) {
  const double u1 = rng.next_unit();
  const double u2 = rng.next_unit();
  return HiddenState{ContinuousState{{u1, u2}}};
}

}  // namespace

ModelSpec build_microstate_leak_model() {
  ModelSpec m;
  m.id = "leak";
  m.lambda_domain = BoxDomain{{{0, 1}, {0, 1}}};
  m.mu_a_domain = BoxDomain{{{-1, 1}, {-1, 1}, {-1, 1}}};
  m.sample_lambda = unit_square_lambda;
  m.sample_microstates = [](const Direction&, const Direction& b,
                            const HiddenState&, RngStream&) {
    // The leak: the remote setting rides in on mu_a.
    return std::make_pair(
        Microstate{ContinuousState{{b.x(), b.y(), b.z()}}, Side::A},
        Microstate{trivial_state(), Side::B});
  };
  m.respond_a = leak_respond_a;
  m.respond_b = leak_respond_b;
  m.locality.respond_a_reads = {RespondInput::OwnSetting, RespondInput::Lambda,
                                RespondInput::OwnMicrostate};
  m.locality.respond_b_reads = {RespondInput::Lambda};
  m.exact_E = [](const Direction& a, const Direction& b) {
    return -std::cos(angle_between(a, b));
  };
  m.exact_table = [](const SettingsPolicy& policy) {
    return std::optional<ExactJointTable>(
        leak_style_table(policy, b_marginal(policy), /*mu_follows_pair=*/true));
  };
  return m;
}

ModelSpec build_microstate_leak_ablated(const SettingsPolicy& marginal_source) {
  marginal_source.validate();
  const BMarginal marg = b_marginal(marginal_source);

  ModelSpec m = build_microstate_leak_model();
  m.id = "leak-ablated";
  m.sample_microstates = [marg](const Direction&, const Direction&,
                                const HiddenState&, RngStream& rng) {
    // Settings-independent replacement: draw the encoding from the marginal.
    double u = rng.next_unit();
    std::size_t pick = marg.dirs.size() - 1;
    for (std::size_t i = 0; i < marg.dirs.size(); ++i) {
      if (u < marg.weights[i]) {
        pick = i;
        break;
      }
      u -= marg.weights[i];
    }
    const Direction& bt = marg.dirs[pick];
    return std::make_pair(
        Microstate{ContinuousState{{bt.x(), bt.y(), bt.z()}}, Side::A},
        Microstate{trivial_state(), Side::B});
  };
  m.exact_E = [marg](const Direction& a, const Direction&) {
    double e = 0.0;
    for (std::size_t i = 0; i < marg.dirs.size(); ++i) {
      e += marg.weights[i] * -std::cos(angle_between(a, marg.dirs[i]));
    }
    return e;
  };
  m.exact_table = [marg](const SettingsPolicy& policy) {
    return std::optional<ExactJointTable>(
        leak_style_table(policy, marg, /*mu_follows_pair=*/false));
  };
  return m;
}

ModelSpec build_result_leak_demo_model() {
  ModelSpec m;
  m.id = "resultleak";
  m.mu_a_domain = BoxDomain{{{0, 1}}};
  m.mu_b_domain = BoxDomain{{{0, 1}}};
  m.sample_lambda = [](const Direction&, const Direction&, RngStream&) {
    return HiddenState{trivial_state()};
  };
  m.sample_microstates = [](const Direction&, const Direction&,
                            const HiddenState&, RngStream& rng) {
    // mu_b decides B; mu_a gets a copy of it, i.e. the remote result leaks.
    const double w = rng.next_unit();
    return std::make_pair(Microstate{ContinuousState{{w}}, Side::A},
                          Microstate{ContinuousState{{w}}, Side::B});
  };
  m.respond_a = [](const Direction&, const HiddenState&, const Microstate& mu,
                   RngStream&) {
    return Outcome(sign_pm(cvals(mu.payload)[0] - 0.5));
  };
  m.respond_b = [](const Direction&, const HiddenState&, const Microstate& mu,
                   RngStream&) {
    return Outcome(sign_pm(cvals(mu.payload)[0] - 0.5));
  };
  m.locality.respond_a_reads = {RespondInput::OwnMicrostate};
  m.locality.respond_b_reads = {RespondInput::OwnMicrostate};
  m.exact_E = [](const Direction&, const Direction&) { return 1.0; };
  m.exact_table = [](const SettingsPolicy& policy) -> std::optional<ExactJointTable> {
    policy.validate();
    ExactJointTable t;
    t.policy = policy;
    t.n_mu_a = 2;
    t.n_mu_b = 2;
    t.mu_a_labels = {"w[0,.5)", "w[.5,1]"};
    t.mu_b_labels = {"w[0,.5)", "w[.5,1]"};
    t.allocate();
    for (std::size_t pair = 0; pair < policy.size(); ++pair) {
      t.at(pair, 0, 0, 0, 0, 0) = 0.5;  // w < .5: A = B = -1
      t.at(pair, 0, 1, 1, 1, 1) = 0.5;  // w >= .5: A = B = +1
    }
    t.validate();
    return t;
  };
  return m;
}

ModelSpec build_settings_biased_model(double shift) {
  const auto d = paper_directions();
  ModelSpec m;
  m.id = "settings-biased";
  m.lambda_domain = BoxDomain{{{0, 1 + shift}, {0, 1}}};
  m.sample_lambda = [d, shift](const Direction& a, const Direction& b,
                               RngStream& rng) {
    double u1 = rng.next_unit();
    // Settings dependence smuggled into the hidden-state distribution.
    if (same_direction(a, d.a) && same_direction(b, d.b)) u1 += shift;
    const double u2 = rng.next_unit();
    return HiddenState{ContinuousState{{u1, u2}}};
  };
  m.sample_microstates = [](const Direction&, const Direction&,
                            const HiddenState&, RngStream&) {
    return std::make_pair(Microstate{trivial_state(), Side::A},
                          Microstate{trivial_state(), Side::B});
  };
  m.respond_a = [](const Direction&, const HiddenState& lambda,
                   const Microstate&, RngStream&) {
    return Outcome(cvals(lambda.payload)[1] < 0.5 ? +1 : -1);
  };
  m.respond_b = [](const Direction&, const HiddenState& lambda,
                   const Microstate&, RngStream&) {
    return Outcome(cvals(lambda.payload)[1] < 0.5 ? -1 : +1);
  };
  m.locality.respond_a_reads = {RespondInput::Lambda};
  m.locality.respond_b_reads = {RespondInput::Lambda};
  return m;
}

}  // namespace bellsim::models
