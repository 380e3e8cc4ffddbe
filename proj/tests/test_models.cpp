#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bellsim/direction.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/exact_table.hpp"
#include "bellsim/models.hpp"
#include "bellsim/policy.hpp"
#include "bellsim/runner.hpp"
#include "bellsim/state.hpp"

namespace {

using namespace bellsim;

constexpr double kPi = 3.14159265358979323846;
constexpr double kRoot2Over2 = 0.70710678118654752440;

// Joint outcome distribution of one policy pair, marginalized over all
// hidden-state and microstate cells. ai/bi index -1 as 0, +1 as 1.
std::array<std::array<double, 2>, 2> outcome_marginal(const ExactJointTable& t,
                                                      std::size_t pair) {
  std::array<std::array<double, 2>, 2> m{{{0, 0}, {0, 0}}};
  for (std::size_t l = 0; l < t.n_lambda; ++l) {
    for (std::size_t ma = 0; ma < t.n_mu_a; ++ma) {
      for (std::size_t mb = 0; mb < t.n_mu_b; ++mb) {
        for (int ai = 0; ai < 2; ++ai) {
          for (int bi = 0; bi < 2; ++bi) {
            m[ai][bi] += t.at(pair, l, ma, mb, ai, bi);
          }
        }
      }
    }
  }
  return m;
}

// P(A = +1 | pair, lambda cell), and the cell's total mass.
struct CellConditional {
  double mass = 0.0;
  double p_a_plus = 0.0;
};

CellConditional a_conditional(const ExactJointTable& t, std::size_t pair,
                              std::size_t l) {
  double mass = 0.0, plus = 0.0;
  for (std::size_t ma = 0; ma < t.n_mu_a; ++ma) {
    for (std::size_t mb = 0; mb < t.n_mu_b; ++mb) {
      for (int ai = 0; ai < 2; ++ai) {
        for (int bi = 0; bi < 2; ++bi) {
          const double p = t.at(pair, l, ma, mb, ai, bi);
          mass += p;
          if (ai == 1) plus += p;
        }
      }
    }
  }
  return {mass, mass > 0 ? plus / mass : 0.0};
}

// Independent integration oracle for the hemisphere model, deliberately on a
// different generator than the library.
double sign_model_e_oracle(const Direction& a, const Direction& b,
                           std::uint64_t seed, std::size_t n) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 2.0 * unit(gen) - 1.0;
    const double phi = 2.0 * kPi * unit(gen);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double lx = r * std::cos(phi), ly = r * std::sin(phi);
    const int A = sign_pm(a.x() * lx + a.y() * ly + a.z() * z);
    const int B = -sign_pm(b.x() * lx + b.y() * ly + b.z() * z);
    sum += A * B;
  }
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("singlet oracle reproduces the quantum joint distribution") {
  const ModelSpec m = models::build_singlet_oracle();
  const SettingsPolicy p = SettingsPolicy::paper();
  const auto table = m.exact_table(p);
  REQUIRE(table.has_value());

  for (std::size_t pair = 0; pair < p.size(); ++pair) {
    const double ct =
        std::cos(angle_between(p.pairs[pair].first, p.pairs[pair].second));
    const auto marg = outcome_marginal(*table, pair);
    for (int ai = 0; ai < 2; ++ai) {
      for (int bi = 0; bi < 2; ++bi) {
        const int A = ai == 1 ? +1 : -1;
        const int B = bi == 1 ? +1 : -1;
        CHECK(marg[ai][bi] ==
              doctest::Approx((1.0 - A * B * ct) / 4.0).epsilon(1e-12));
      }
    }
    CHECK(table->expectation(pair) == doctest::Approx(-ct).epsilon(1e-12));
    CHECK(m.exact_E(p.pairs[pair].first, p.pairs[pair].second) ==
          doctest::Approx(-ct).epsilon(1e-12));
  }
}

TEST_CASE("singlet closed form holds off the canonical grid") {
  const ModelSpec m = models::build_singlet_oracle();
  const Direction a(1, 0, 0);
  for (double deg : {10.0, 30.0, 60.0, 120.0, 170.0}) {
    const double th = deg * kPi / 180.0;
    CHECK(m.exact_E(a, Direction::from_azimuth(th)) ==
          doctest::Approx(-std::cos(th)).epsilon(1e-12));
  }
  // Out-of-plane direction.
  CHECK(m.exact_E(a, Direction(0, 0, 1)) == doctest::Approx(0.0));
  CHECK(m.exact_E(a, a) == doctest::Approx(-1.0));
}

TEST_CASE("hemisphere model matches its closed form and an independent oracle") {
  const ModelSpec m = models::build_sign_model();
  const Direction a(1, 0, 0);

  for (double deg : {0.0, 30.0, 45.0, 90.0, 135.0, 180.0}) {
    const double th = deg * kPi / 180.0;
    const Direction b = deg == 180.0 ? Direction(-1, 0, 0)
                                     : Direction::from_azimuth(th);
    CHECK(m.exact_E(a, b) == doctest::Approx(-1.0 + 2.0 * th / kPi).epsilon(1e-12));
  }

  // Geometry-independent check: integrate the responses over a uniform
  // sphere with a foreign generator. sd ~ 1/sqrt(n) = 3.2e-3; allow 5 sd.
  const std::size_t n = 100000;
  const Direction b45 = Direction::from_azimuth(kPi / 4);
  CHECK(std::abs(sign_model_e_oracle(a, b45, 1234, n) - m.exact_E(a, b45)) <
        0.016);
  const Direction b120 = Direction::from_azimuth(2 * kPi / 3);
  CHECK(std::abs(sign_model_e_oracle(a, b120, 77, n) - m.exact_E(a, b120)) <
        0.016);
}

TEST_CASE("hemisphere model exact table marginals match the arc geometry") {
  const ModelSpec m = models::build_sign_model();
  const SettingsPolicy p = SettingsPolicy::paper();
  const auto table = m.exact_table(p);
  REQUIRE(table.has_value());
  for (std::size_t pair = 0; pair < p.size(); ++pair) {
    const double th =
        angle_between(p.pairs[pair].first, p.pairs[pair].second);
    const auto marg = outcome_marginal(*table, pair);
    // Same hemisphere for both axes: probability (pi - theta)/(2 pi).
    CHECK(marg[1][0] == doctest::Approx((kPi - th) / (2 * kPi)).epsilon(1e-12));
    CHECK(marg[0][1] == doctest::Approx((kPi - th) / (2 * kPi)).epsilon(1e-12));
    CHECK(marg[1][1] == doctest::Approx(th / (2 * kPi)).epsilon(1e-12));
    CHECK(marg[0][0] == doctest::Approx(th / (2 * kPi)).epsilon(1e-12));
    CHECK(table->expectation(pair) ==
          doctest::Approx(-1.0 + 2.0 * th / kPi).epsilon(1e-12));
  }
}

TEST_CASE("microstate-leak model reproduces the singlet statistics exactly") {
  const ModelSpec m = models::build_microstate_leak_model();
  const SettingsPolicy p = SettingsPolicy::paper();
  const auto table = m.exact_table(p);
  REQUIRE(table.has_value());

  for (std::size_t pair = 0; pair < p.size(); ++pair) {
    const double ct =
        std::cos(angle_between(p.pairs[pair].first, p.pairs[pair].second));
    const auto marg = outcome_marginal(*table, pair);
    for (int ai = 0; ai < 2; ++ai) {
      for (int bi = 0; bi < 2; ++bi) {
        const int A = ai == 1 ? +1 : -1;
        const int B = bi == 1 ? +1 : -1;
        CHECK(marg[ai][bi] ==
              doctest::Approx((1.0 - A * B * ct) / 4.0).epsilon(1e-12));
      }
    }
  }
  // Anti-correlation probability at angle theta is cos^2(theta/2).
  const auto marg0 = outcome_marginal(*table, 0);
  const double th0 = kPi / 4;
  CHECK(marg0[1][0] + marg0[0][1] ==
        doctest::Approx(std::cos(th0 / 2) * std::cos(th0 / 2)).epsilon(1e-12));
}

TEST_CASE("microstate-leak responders are local but the microstate carries b") {
  const ModelSpec m = models::build_microstate_leak_model();
  CHECK(m.has_local_responders());
  CHECK(m.locality.local());
  const Ensemble e = run_experiment(m, SettingsPolicy::paper(), 100, 21);
  for (const auto& r : e.runs) {
    const auto& enc = std::get<ContinuousState>(r.mu_a.payload).values;
    REQUIRE(enc.size() == 3);
    CHECK(enc[0] == r.setting_b.x());
    CHECK(enc[1] == r.setting_b.y());
    CHECK(enc[2] == r.setting_b.z());
  }
}

TEST_CASE("ablated leak averages the remote dependence away") {
  const SettingsPolicy p = SettingsPolicy::paper();
  const ModelSpec m = models::build_microstate_leak_ablated(p);
  const PaperDirections d = paper_directions();

  // mu_a now carries b or b' with probability 1/2 each, independent of the
  // actual remote setting, so E(a, .) collapses to the average response.
  const double e_a = -(std::cos(angle_between(d.a, d.b)) +
                       std::cos(angle_between(d.a, d.b_prime))) /
                     2.0;
  const double e_ap = -(std::cos(angle_between(d.a_prime, d.b)) +
                        std::cos(angle_between(d.a_prime, d.b_prime))) /
                      2.0;
  CHECK(e_a == doctest::Approx(-kRoot2Over2).epsilon(1e-12));
  CHECK(e_ap == doctest::Approx(0.0));

  for (const Direction& b : {d.b, d.b_prime}) {
    CHECK(m.exact_E(d.a, b) == doctest::Approx(e_a).epsilon(1e-12));
    CHECK(m.exact_E(d.a_prime, b) == doctest::Approx(e_ap).epsilon(1e-12));
  }
  const auto table = m.exact_table(p);
  REQUIRE(table.has_value());
  CHECK(table->expectation(0) == doctest::Approx(e_a).epsilon(1e-12));
  CHECK(table->expectation(2) == doctest::Approx(e_ap).epsilon(1e-12));
}

TEST_CASE("result-leak demo forces identical outcomes") {
  const ModelSpec m = models::build_result_leak_demo_model();
  const SettingsPolicy p = SettingsPolicy::paper();
  CHECK(m.exact_E(p.pairs[0].first, p.pairs[0].second) == 1.0);

  const auto table = m.exact_table(p);
  REQUIRE(table.has_value());
  for (std::size_t pair = 0; pair < p.size(); ++pair) {
    const auto marg = outcome_marginal(*table, pair);
    CHECK(marg[1][1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(marg[0][0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(marg[1][0] == 0.0);
    CHECK(marg[0][1] == 0.0);
    CHECK(table->expectation(pair) == doctest::Approx(1.0).epsilon(1e-15));
  }
  const Ensemble e = run_experiment(m, p, 500, 3);
  for (const auto& r : e.runs) CHECK(r.outcome_a == r.outcome_b);
}

TEST_CASE("weighted dice expectations match the hand computation") {
  const ModelSpec m = models::build_weighted_dice_model({0.9, 0.2});
  const SettingsPolicy p = models::dice_policy();
  // e(die) = 2w - 1: 0.8 and -0.6. Mixed over the fair lambda:
  //   same settings:      (0.64 + 0.36)/2 = 0.5
  //   different settings: (-0.48 - 0.48)/2 = -0.48
  const double e_same = 0.5;
  const double e_diff = -0.48;
  CHECK(m.exact_E(p.pairs[0].first, p.pairs[0].second) ==
        doctest::Approx(e_same).epsilon(1e-15));
  CHECK(m.exact_E(p.pairs[1].first, p.pairs[1].second) ==
        doctest::Approx(e_diff).epsilon(1e-15));
  CHECK(m.exact_E(p.pairs[2].first, p.pairs[2].second) ==
        doctest::Approx(e_diff).epsilon(1e-15));
  CHECK(m.exact_E(p.pairs[3].first, p.pairs[3].second) ==
        doctest::Approx(e_same).epsilon(1e-15));

  const auto table = m.exact_table(p);
  REQUIRE(table.has_value());
  for (std::size_t pair = 0; pair < 4; ++pair) {
    CHECK(table->expectation(pair) ==
          doctest::Approx(m.exact_E(p.pairs[pair].first, p.pairs[pair].second))
              .epsilon(1e-13));
  }
}

TEST_CASE("dice responses are deterministic given the microstate yet biased") {
  const ModelSpec m = models::build_weighted_dice_model({0.9, 0.2});
  const auto table = m.exact_table(models::dice_policy());
  REQUIRE(table.has_value());

  // Conditioned on (pair, lambda) alone, P(A=+1) is one of the two dice
  // weights; conditioned further on the microstate cell it is 0 or 1.
  for (std::size_t pair = 0; pair < 4; ++pair) {
    for (std::size_t l = 0; l < table->n_lambda; ++l) {
      const auto cond = a_conditional(*table, pair, l);
      REQUIRE(cond.mass > 0.0);
      const bool is_heavy = std::abs(cond.p_a_plus - 0.9) < 1e-12;
      const bool is_light = std::abs(cond.p_a_plus - 0.2) < 1e-12;
      CHECK((is_heavy || is_light));
      for (std::size_t ma = 0; ma < table->n_mu_a; ++ma) {
        double mass = 0.0, plus = 0.0;
        for (std::size_t mb = 0; mb < table->n_mu_b; ++mb) {
          for (int ai = 0; ai < 2; ++ai) {
            for (int bi = 0; bi < 2; ++bi) {
              const double q = table->at(pair, l, ma, mb, ai, bi);
              mass += q;
              if (ai == 1) plus += q;
            }
          }
        }
        if (mass > 0.0) {
          const double cellp = plus / mass;
          CHECK((cellp < 1e-12 || cellp > 1.0 - 1e-12));
        }
      }
    }
  }

  // Replaying a responder with identical inputs gives identical outcomes.
  RngStream rng = derive_rng_stream(1, 2, Stage::RespondA);
  const HiddenState l1{DiscreteState{1}};
  const Microstate mu{ContinuousState{{0.55}}, Side::A};
  RngStream r1 = rng, r2 = rng;
  const Outcome o1 = m.respond_a(Direction(1, 0, 0), l1, mu, r1);
  const Outcome o2 = m.respond_a(Direction(1, 0, 0), l1, mu, r2);
  CHECK(o1 == o2);
}

TEST_CASE("dice weight validation") {
  CHECK_THROWS_AS(models::build_weighted_dice_model({0.9}), InvalidWeights);
  CHECK_THROWS_AS(models::build_weighted_dice_model({0.5, 0.5}), InvalidWeights);
  CHECK_THROWS_AS(models::build_weighted_dice_model({1.1, 0.2}), InvalidWeights);
  CHECK_THROWS_AS(models::build_weighted_dice_model({0.9, -0.1}), InvalidWeights);
  CHECK_NOTHROW(models::build_weighted_dice_model({0.9, 0.2}));
}

TEST_CASE("dice model rejects settings off its grid") {
  const ModelSpec m = models::build_weighted_dice_model({0.9, 0.2});
  CHECK_THROWS_AS(run_experiment(m, SettingsPolicy::paper(), 10, 1),
                  ModelFailure);
  CHECK_THROWS_AS(m.exact_table(SettingsPolicy::paper()), ModelFailure);
}

TEST_CASE("factorizable table model validation") {
  const std::vector<double> rho_ok = {0.5, 0.5};
  const std::vector<std::vector<double>> t_ok = {{0.1, 0.9}, {0.4, 0.6}};
  CHECK_NOTHROW(models::build_factorizable_table_model("f", rho_ok, t_ok, t_ok));
  CHECK_THROWS_AS(
      models::build_factorizable_table_model("f", {0.5, 0.4}, t_ok, t_ok),
      InvalidArgument);
  CHECK_THROWS_AS(models::build_factorizable_table_model("f", {}, {}, {}),
                  InvalidArgument);
  CHECK_THROWS_AS(models::build_factorizable_table_model(
                      "f", rho_ok, {{0.1, 1.2}, {0.4, 0.6}}, t_ok),
                  InvalidArgument);
  CHECK_THROWS_AS(
      models::build_factorizable_table_model("f", rho_ok, {{0.1, 0.9}}, t_ok),
      InvalidArgument);
}

TEST_CASE("deterministic strategy enumeration: the bound is exactly 2") {
  // All 16 deterministic assignments over two settings per side. For each,
  // the table model built from the same assignment must reproduce the
  // enumerated combination value, and the maximum must be exactly 2.
  const SettingsPolicy p = SettingsPolicy::paper();
  double best = 0.0;
  for (int mask = 0; mask < 16; ++mask) {
    const int A0 = (mask & 1) ? +1 : -1;
    const int A1 = (mask & 2) ? +1 : -1;
    const int B0 = (mask & 4) ? +1 : -1;
    const int B1 = (mask & 8) ? +1 : -1;
    const double s = std::abs(A0 * B0 + A0 * B1 + A1 * B0 - A1 * B1);

    const ModelSpec m = models::build_factorizable_table_model(
        "det", {1.0},
        {{A0 > 0 ? 1.0 : 0.0}, {A1 > 0 ? 1.0 : 0.0}},
        {{B0 > 0 ? 1.0 : 0.0}, {B1 > 0 ? 1.0 : 0.0}});
    const auto table = m.exact_table(p);
    REQUIRE(table.has_value());
    const double model_s =
        std::abs(table->expectation(0) + table->expectation(1) +
                 table->expectation(2) - table->expectation(3));
    CHECK(model_s == doctest::Approx(s).epsilon(1e-15));
    best = std::max(best, model_s);
  }
  CHECK(best == 2.0);
}

TEST_CASE("random factorizable models are reproducible and valid") {
  const ModelSpec m1 = models::build_random_factorizable_model(4, 99);
  const ModelSpec m2 = models::build_random_factorizable_model(4, 99);
  const ModelSpec m3 = models::build_random_factorizable_model(4, 100);
  const PaperDirections d = paper_directions();
  CHECK(m1.exact_E(d.a, d.b) == m2.exact_E(d.a, d.b));
  CHECK(m1.exact_E(d.a, d.b) != m3.exact_E(d.a, d.b));
  CHECK(m1.id == "randfac:4:99");
  CHECK_THROWS_AS(models::build_random_factorizable_model(0, 1), InvalidArgument);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ModelSpec m =
        models::build_random_factorizable_model(1 + seed % 8, seed);
    const auto table = m.exact_table(SettingsPolicy::paper());
    REQUIRE(table.has_value());
    CHECK_NOTHROW(table->validate());
    const double s =
        std::abs(table->expectation(0) + table->expectation(1) +
                 table->expectation(2) - table->expectation(3));
    CHECK(s <= 2.0 + 1e-12);
  }
}

TEST_CASE("model ids round through the registry") {
  for (const char* id :
       {"singlet", "sign", "leak", "resultleak", "dice:0.9,0.2", "randfac:4:7"}) {
    const ModelSpec m = models::build_from_id(id);
    CHECK(m.id == id);
    CHECK_NOTHROW(m.validate());
    CHECK_NOTHROW(models::descriptor_for(id));
    CHECK_NOTHROW(models::default_policy_for(id).validate());
  }
  CHECK_THROWS_AS(models::build_from_id("nosuch"), InvalidArgument);
  CHECK_THROWS_AS(models::build_from_id("dice:abc,0.2"), InvalidArgument);
  CHECK_THROWS_AS(models::build_from_id("dice:0.5,0.5"), InvalidWeights);
  CHECK_THROWS_AS(models::build_from_id("randfac:4"), InvalidArgument);
  CHECK_THROWS_AS(models::build_from_id("randfac:0:1"), InvalidArgument);
}

TEST_CASE("the zoo lists the canonical instances") {
  const auto zoo = models::zoo();
  CHECK(zoo.size() == 6);
  for (const auto& d : zoo) {
    CHECK_NOTHROW(models::build_from_id(d.model_id).validate());
    // Every zoo instance supports exact expectations.
    CHECK(d.has_exact_e);
  }
}

TEST_CASE("joint table validation rejects bad mass") {
  ExactJointTable t;
  t.policy = SettingsPolicy::single(Direction(1, 0, 0), Direction(0, 1, 0));
  t.allocate();
  t.at(0, 0, 0, 0, 1, 1) = 0.7;
  t.at(0, 0, 0, 0, 0, 0) = 0.2;  // mass 0.9
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
  t.at(0, 0, 0, 0, 0, 0) = 0.3;
  CHECK_NOTHROW(t.validate());
  t.at(0, 0, 0, 0, 1, 0) = -0.1;
  t.at(0, 0, 0, 0, 0, 1) = 0.1;
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
}

TEST_CASE("settings-biased fixture shifts the hidden state as declared") {
  const ModelSpec m = models::build_settings_biased_model(0.3);
  const SettingsPolicy p = SettingsPolicy::paper();
  const Ensemble e = run_experiment(m, p, 4000, 17);
  double mean_target = 0.0, mean_other = 0.0;
  std::size_t n_target = 0, n_other = 0;
  for (const auto& r : e.runs) {
    const double u1 = std::get<ContinuousState>(r.lambda.payload).values[0];
    if (p.find_pair(r.setting_a, r.setting_b) == 0) {
      mean_target += u1;
      ++n_target;
    } else {
      mean_other += u1;
      ++n_other;
    }
  }
  REQUIRE(n_target > 100);
  REQUIRE(n_other > 100);
  // Means 0.8 vs 0.5; separation is enormous at these counts.
  CHECK(mean_target / n_target > 0.7);
  CHECK(mean_other / n_other < 0.6);
}
