#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "bellsim/auditors.hpp"
#include "bellsim/binning.hpp"
#include "bellsim/direction.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/estimators.hpp"
#include "bellsim/game.hpp"
#include "bellsim/models.hpp"
#include "bellsim/ndjson.hpp"
#include "bellsim/policy.hpp"
#include "bellsim/runner.hpp"
#include "bellsim/stats.hpp"

namespace {

using namespace bellsim;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoRootTwo = 2.8284271247461903;

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

}  // namespace

TEST_CASE("canonical config uses the four reference directions") {
  const GameConfig cfg = GameConfig::canonical(1000, LeakChannel::None, 1);
  const PaperDirections d = paper_directions();
  REQUIRE(cfg.questions_1.size() == 2);
  REQUIRE(cfg.questions_2.size() == 2);
  CHECK(same_direction(cfg.questions_1[0], d.a));
  CHECK(same_direction(cfg.questions_1[1], d.a_prime));
  CHECK(same_direction(cfg.questions_2[0], d.b));
  CHECK(same_direction(cfg.questions_2[1], d.b_prime));
  CHECK(cfg.rounds == 1000);
}

TEST_CASE("game config validation") {
  GameConfig cfg = GameConfig::canonical(0, LeakChannel::None, 1);
  CHECK_THROWS_AS(play_game(cfg, sign_strategy()), InvalidArgument);
  cfg = GameConfig::canonical(100, LeakChannel::None, 1);
  cfg.questions_1.clear();
  CHECK_THROWS_AS(play_game(cfg, sign_strategy()), InvalidArgument);
}

TEST_CASE("shared-direction strategy: the best honest score misses the target") {
  const GameConfig cfg = GameConfig::canonical(20000, LeakChannel::None, 7);
  const GameScore score = play_game(cfg, sign_strategy());

  REQUIRE(score.pairs.size() == 4);
  for (const auto& p : score.pairs) {
    const double theta = angle_between(p.q1, p.q2);
    CHECK(p.target == doctest::Approx(-std::cos(theta)).epsilon(1e-12));
    // This strategy realizes E = -1 + 2 theta / pi, not -cos(theta).
    const double realized = -1.0 + 2.0 * theta / kPi;
    const double se = std::sqrt((1.0 - realized * realized) /
                                static_cast<double>(p.n));
    CHECK(std::abs(p.e - realized) < 5 * se);
  }
  // At 45 degrees the miss is cos(pi/4) - 1/2 = 0.2071...
  CHECK(score.max_abs_deviation ==
        doctest::Approx(std::sqrt(0.5) - 0.5).epsilon(0.25));
  CHECK(score.max_abs_deviation > 0.15);

  REQUIRE(score.has_chsh);
  CHECK(std::abs(score.chsh - 2.0) < 5 * score.chsh_std_error);
  CHECK(score.transcript.model_id == "game:sign:none");
  CHECK(score.transcript.runs.size() == 20000);
}

TEST_CASE("question-leak strategy reproduces the reference statistics") {
  const GameConfig cfg =
      GameConfig::canonical(20000, LeakChannel::RemoteQuestion, 11);
  const GameScore score = play_game(cfg, pilot_wave_strategy());

  REQUIRE(score.pairs.size() == 4);
  for (const auto& p : score.pairs) {
    const double se = std::sqrt(
        std::max(1e-12, 1.0 - p.target * p.target) / static_cast<double>(p.n));
    CHECK(std::abs(p.e - p.target) < 5 * se);
  }
  CHECK(score.max_abs_deviation < 0.05);
  REQUIRE(score.has_chsh);
  CHECK(std::abs(score.chsh - kTwoRootTwo) < 5 * score.chsh_std_error);
  CHECK(score.transcript.model_id == "game:pilotwave:remote-question");
}

TEST_CASE("question-leak strategy transcript matches the leak model's tables") {
  const std::uint64_t rounds = 20000;
  const GameConfig cfg =
      GameConfig::canonical(rounds, LeakChannel::RemoteQuestion, 13);
  const GameScore score = play_game(cfg, pilot_wave_strategy());

  const ModelSpec leak = models::build_microstate_leak_model();
  const auto table = leak.exact_table(SettingsPolicy::paper());
  REQUIRE(table.has_value());

  // Counts over (pair, A, B) against the exact joint, fully specified null.
  const SettingsPolicy& pol = score.transcript.policy;
  REQUIRE(pol.size() == 4);
  std::vector<std::uint64_t> counts(16, 0);
  for (const auto& r : score.transcript.runs) {
    const std::size_t pair = pol.find_pair(r.setting_a, r.setting_b);
    REQUIRE(pair != SettingsPolicy::npos);
    counts[pair * 4 + r.outcome_a.index() * 2 + r.outcome_b.index()] += 1;
  }
  std::vector<double> probs(16, 0.0);
  for (std::size_t pair = 0; pair < 4; ++pair) {
    const std::size_t ref = table->policy.find_pair(pol.pairs[pair].first,
                                                    pol.pairs[pair].second);
    REQUIRE(ref != SettingsPolicy::npos);
    const auto marg = outcome_marginal(*table, ref);
    for (int ai = 0; ai < 2; ++ai) {
      for (int bi = 0; bi < 2; ++bi) {
        probs[pair * 4 + ai * 2 + bi] = 0.25 * marg[ai][bi];
      }
    }
  }
  const Chi2Result gof = chi2_goodness_of_fit(counts, probs, 15);
  CHECK(gof.p_value >= 1e-3);
}

TEST_CASE("question-leak strategy refuses to play without the channel") {
  const GameConfig cfg = GameConfig::canonical(100, LeakChannel::None, 1);
  CHECK_THROWS_AS(play_game(cfg, pilot_wave_strategy()), StrategyViolation);
}

TEST_CASE("answers outside +1/-1 are a strategy violation") {
  Strategy bad;
  bad.name = "bad";
  bad.prepare = [](RngStream&) { return std::vector<double>{}; };
  bad.answer_1 = [](const Direction&, const std::vector<double>&,
                    const std::optional<LeakObservation>&, RngStream&) {
    return 7;
  };
  bad.answer_2 = [](const Direction&, const std::vector<double>&, RngStream&) {
    return -1;
  };
  const GameConfig cfg = GameConfig::canonical(10, LeakChannel::None, 1);
  CHECK_THROWS_AS(play_game(cfg, bad), StrategyViolation);
}

TEST_CASE("transcripts are deterministic and serializable") {
  const GameConfig cfg = GameConfig::canonical(300, LeakChannel::RemoteQuestion, 9);
  const GameScore s1 = play_game(cfg, pilot_wave_strategy());
  const GameScore s2 = play_game(cfg, pilot_wave_strategy());
  CHECK(to_ndjson(s1.transcript) == to_ndjson(s2.transcript));

  // The leaked question is recorded as player 1's microstate.
  for (const auto& r : s1.transcript.runs) {
    const auto& enc = std::get<ContinuousState>(r.mu_a.payload).values;
    REQUIRE(enc.size() == 3);
    CHECK(enc[0] == r.setting_b.x());
    CHECK(enc[1] == r.setting_b.y());
    CHECK(enc[2] == r.setting_b.z());
    // The note rides along as the hidden state.
    CHECK(std::get<ContinuousState>(r.lambda.payload).values.size() == 2);
  }
  // Round-trips through the ensemble format.
  const Ensemble back = ndjson_from_string(to_ndjson(s1.transcript));
  CHECK(back.runs.size() == 300);
}

TEST_CASE("non-canonical questions score without a chsh value") {
  GameConfig cfg;
  cfg.questions_1 = {Direction(1, 0, 0)};
  cfg.questions_2 = {Direction::from_azimuth(kPi / 3)};
  cfg.rounds = 20000;
  cfg.seed = 3;
  const GameScore score = play_game(cfg, sign_strategy());
  CHECK_FALSE(score.has_chsh);
  REQUIRE(score.pairs.size() == 1);
  CHECK(score.pairs[0].target == doctest::Approx(-0.5).epsilon(1e-12));
  // Realized: -1 + 2/3 = -1/3; miss = 1/6.
  CHECK(score.max_abs_deviation ==
        doctest::Approx(1.0 / 6.0).epsilon(0.3));
}

TEST_CASE("strategy registry") {
  const auto& ids = strategy_ids();
  REQUIRE(ids.size() == 2);
  CHECK(ids[0] == "sign");
  CHECK(ids[1] == "pilotwave");
  for (const auto& id : ids) {
    CHECK(strategy_from_id(id).name == id);
  }
  CHECK_THROWS_AS(strategy_from_id("nope"), InvalidArgument);
}

namespace {

const AuditVerdict& verdict_of(const std::vector<AuditVerdict>& verdicts,
                               Condition c) {
  for (const auto& v : verdicts) {
    if (v.condition == c) return v;
  }
  REQUIRE(false);
  return verdicts.front();
}

std::vector<AuditVerdict> audit_sample(const ModelSpec& model,
                                       const Ensemble& ens, unsigned bins) {
  AuditOptions opt;
  opt.bins = bins;
  BinnedEnsemble binned(ens, domains_of(model), opt.bins);
  return {audit_factorizability(binned, opt),
          audit_settings_independence(binned, opt),
          audit_microstate_independence(binned, opt),
          audit_parameter_independence(binned, opt),
          audit_outcome_independence(binned, opt),
          audit_inverted_oi_pattern(binned, opt)};
}

}  // namespace

TEST_CASE("game policy is the canonical four-pair grid") {
  SettingsPolicy p = game_policy();
  CHECK(p.id == "game-grid");
  REQUIRE(p.pairs.size() == 4);
  PaperDirections d = paper_configuration();
  CHECK(same_direction(p.pairs[0].first, d.a));
  CHECK(same_direction(p.pairs[0].second, d.b));
  CHECK(same_direction(p.pairs[3].first, d.a_prime));
  CHECK(same_direction(p.pairs[3].second, d.b_prime));
  for (double w : p.weights) CHECK(w == doctest::Approx(0.25));
}

TEST_CASE("replay model ids are validated") {
  CHECK_THROWS_AS(game_replay_model("game:"), InvalidArgument);
  CHECK_THROWS_AS(game_replay_model("game:banana:none"), InvalidArgument);
  CHECK_THROWS_AS(game_replay_model("game:sign:sideways"), InvalidArgument);
  CHECK_THROWS_AS(game_replay_model("signgame"), InvalidArgument);
  CHECK(game_replay_model("game:sign:none").id == "game:sign:none");
  CHECK(game_replay_model("game:pilotwave:remote-question").id ==
        "game:pilotwave:remote-question");
}

TEST_CASE("registry resolves transcript model ids") {
  ModelSpec m = models::build_from_id("game:pilotwave:remote-question");
  CHECK(m.id == "game:pilotwave:remote-question");
  CHECK(m.has_local_responders());
  CHECK_FALSE(m.has_exact_table());

  SettingsPolicy p = models::default_policy_for("game:sign:none");
  CHECK(p.id == "game-grid");
  CHECK(p.pairs.size() == 4);

  auto d = models::descriptor_for("game:pilotwave:remote-question");
  CHECK(d.local_causality);
  CHECK(d.settings_independence);
  CHECK_FALSE(d.microstate_independence);
  CHECK_FALSE(d.factorizability);
  auto ds = models::descriptor_for("game:sign:remote-question");
  CHECK(ds.factorizability);  // channel open but never read
  CHECK_FALSE(ds.microstate_independence);
  CHECK_THROWS_AS(models::descriptor_for("game:banana:none"), InvalidArgument);
}

TEST_CASE("replayed strategies reproduce their scores under the runner") {
  const std::uint64_t n = 20000;
  SettingsPolicy policy = game_policy();
  PaperDirections dirs = paper_configuration();

  ModelSpec leaky = models::build_from_id("game:pilotwave:remote-question");
  Ensemble ens = run_experiment(leaky, policy, n, 31);
  ChshReport rep = chsh_statistic(ens, dirs);
  CHECK(std::abs(rep.statistic - kTwoRootTwo) < 5 * rep.std_error);

  ModelSpec fair = models::build_from_id("game:sign:none");
  Ensemble fair_ens = run_experiment(fair, policy, n, 32);
  ChshReport fair_rep = chsh_statistic(fair_ens, dirs);
  CHECK(std::abs(fair_rep.statistic - 2.0) < 5 * fair_rep.std_error);
}

TEST_CASE("replay models carry the strategy's audit fingerprint") {
  const std::uint64_t n = 20000;
  SettingsPolicy policy = game_policy();

  ModelSpec leaky = models::build_from_id("game:pilotwave:remote-question");
  CHECK(audit_structural_locality(leaky, policy).passed);
  Ensemble ens = run_experiment(leaky, policy, n, 33);
  auto verdicts = audit_sample(leaky, ens, 8);
  CHECK(verdict_of(verdicts, Condition::SettingsIndependence).passed);
  CHECK(verdict_of(verdicts, Condition::OutcomeIndependence).passed);
  CHECK_FALSE(verdict_of(verdicts, Condition::MicrostateIndependence).passed);
  CHECK_FALSE(verdict_of(verdicts, Condition::ParameterIndependence).passed);
  CHECK_FALSE(verdict_of(verdicts, Condition::Factorizability).passed);
  CHECK_FALSE(verdict_of(verdicts, Condition::InvertedOiPattern).passed);

  ModelSpec fair = models::build_from_id("game:sign:none");
  CHECK(audit_structural_locality(fair, policy).passed);
  Ensemble fair_ens = run_experiment(fair, policy, n, 34);
  for (const auto& v : audit_sample(fair, fair_ens, 8)) {
    if (v.condition == Condition::InvertedOiPattern) {
      CHECK_FALSE(v.passed);
    } else {
      CHECK(v.passed);
    }
    CHECK_FALSE(v.inconclusive);
  }
}

TEST_CASE("recorded transcripts audit through the replay model") {
  GameConfig cfg = GameConfig::canonical(20000, LeakChannel::RemoteQuestion, 35);
  GameScore score = play_game(cfg, pilot_wave_strategy());
  REQUIRE(score.transcript.model_id == "game:pilotwave:remote-question");

  ModelSpec replay = models::build_from_id(score.transcript.model_id);
  auto verdicts = audit_sample(replay, score.transcript, 8);
  CHECK(verdict_of(verdicts, Condition::SettingsIndependence).passed);
  CHECK_FALSE(verdict_of(verdicts, Condition::MicrostateIndependence).passed);
  CHECK_FALSE(verdict_of(verdicts, Condition::Factorizability).passed);
  CHECK(verdict_of(verdicts, Condition::OutcomeIndependence).passed);
}

TEST_CASE("replaying an unplayable channel is a strategy violation") {
  ModelSpec m = models::build_from_id("game:pilotwave:none");
  CHECK_THROWS_AS(run_experiment(m, game_policy(), 10, 0), StrategyViolation);
}
