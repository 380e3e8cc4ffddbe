#include "bellsim/game.hpp"

#include <cmath>
#include <utility>
#include <variant>

#include "bellsim/errors.hpp"
#include "bellsim/estimators.hpp"
#include "bellsim/policy.hpp"

namespace bellsim {

namespace {

const char* leak_name(LeakChannel leak) {
  return leak == LeakChannel::None ? "none" : "remote-question";
}

SettingsPolicy grid_policy(const std::vector<Direction>& questions_1,
                           const std::vector<Direction>& questions_2) {
  SettingsPolicy policy;
  policy.id = "game-grid";
  const double w =
      1.0 / static_cast<double>(questions_1.size() * questions_2.size());
  for (const auto& q1 : questions_1) {
    for (const auto& q2 : questions_2) {
      policy.pairs.emplace_back(q1, q2);
      policy.weights.push_back(w);
    }
  }
  policy.validate();
  return policy;
}

int checked_answer(int raw, const char* who) {
  if (raw != 1 && raw != -1) {
    throw StrategyViolation(std::string(who) + " answered " +
                            std::to_string(raw) + "; answers must be +1 or -1");
  }
  return raw;
}

}  // namespace

GameConfig GameConfig::canonical(std::uint64_t rounds, LeakChannel leak,
                                 std::uint64_t seed) {
  PaperDirections d = paper_directions();
  GameConfig cfg;
  cfg.questions_1 = {d.a, d.a_prime};
  cfg.questions_2 = {d.b, d.b_prime};
  cfg.rounds = rounds;
  cfg.leak = leak;
  cfg.seed = seed;
  return cfg;
}

GameScore play_game(const GameConfig& config, const Strategy& strategy) {
  if (config.rounds == 0) throw InvalidArgument("rounds must be positive");
  if (config.questions_1.empty() || config.questions_2.empty()) {
    throw InvalidArgument("both question lists must be nonempty");
  }
  if (!strategy.prepare || !strategy.answer_1 || !strategy.answer_2) {
    throw InvalidArgument("strategy is missing a callback");
  }

  const std::size_t n1 = config.questions_1.size();
  const std::size_t n2 = config.questions_2.size();

  SettingsPolicy policy = grid_policy(config.questions_1, config.questions_2);

  GameScore score;
  score.transcript.model_id =
      std::string("game:") + strategy.name + ":" + leak_name(config.leak);
  score.transcript.settings_policy_id = policy.id;
  score.transcript.master_seed = config.seed;
  score.transcript.policy = policy;
  score.transcript.runs.reserve(config.rounds);

  std::vector<std::uint64_t> n_pair(n1 * n2, 0);
  std::vector<double> sum_pair(n1 * n2, 0.0);

  for (std::uint64_t r = 0; r < config.rounds; ++r) {
    RngStream pick = derive_rng_stream(config.seed, r, Stage::Settings);
    std::size_t idx = pick.next_below(n1 * n2);
    const Direction& q1 = config.questions_1[idx / n2];
    const Direction& q2 = config.questions_2[idx % n2];

    RngStream prep_rng = derive_rng_stream(config.seed, r, Stage::Lambda);
    std::vector<double> note = strategy.prepare(prep_rng);

    std::optional<LeakObservation> leak;
    if (config.leak == LeakChannel::RemoteQuestion) {
      leak = LeakObservation{q2};
    }

    RngStream rng1 = derive_rng_stream(config.seed, r, Stage::RespondA);
    RngStream rng2 = derive_rng_stream(config.seed, r, Stage::RespondB);
    int a1 = checked_answer(strategy.answer_1(q1, note, leak, rng1), "player 1");
    int a2 = checked_answer(strategy.answer_2(q2, note, rng2), "player 2");

    RunRecord rec;
    rec.run_index = r;
    rec.setting_a = q1;
    rec.setting_b = q2;
    rec.outcome_a = Outcome(a1);
    rec.outcome_b = Outcome(a2);
    rec.lambda.payload = note.empty() ? trivial_state()
                                      : StatePayload(ContinuousState{note});
    rec.mu_a.side = Side::A;
    rec.mu_a.payload =
        leak ? StatePayload(ContinuousState{{q2.x(), q2.y(), q2.z()}})
             : trivial_state();
    rec.mu_b.side = Side::B;
    rec.mu_b.payload = trivial_state();
    score.transcript.runs.push_back(std::move(rec));

    ++n_pair[idx];
    sum_pair[idx] += static_cast<double>(a1 * a2);
  }

  for (std::size_t idx = 0; idx < n1 * n2; ++idx) {
    PairScore ps;
    ps.q1 = config.questions_1[idx / n2];
    ps.q2 = config.questions_2[idx % n2];
    ps.n = n_pair[idx];
    ps.e = ps.n > 0 ? sum_pair[idx] / static_cast<double>(ps.n) : 0.0;
    ps.target = -std::cos(angle_between(ps.q1, ps.q2));
    if (ps.n >= 2) {
      score.max_abs_deviation =
          std::max(score.max_abs_deviation, std::abs(ps.e - ps.target));
    }
    score.pairs.push_back(ps);
  }

  PaperDirections d = paper_directions();
  auto holds = [](const std::vector<Direction>& qs, const Direction& want) {
    for (const auto& q : qs) {
      if (same_direction(q, want)) return true;
    }
    return false;
  };
  if (holds(config.questions_1, d.a) && holds(config.questions_1, d.a_prime) &&
      holds(config.questions_2, d.b) && holds(config.questions_2, d.b_prime)) {
    try {
      ChshReport rep = chsh_statistic(score.transcript, d);
      score.has_chsh = true;
      score.chsh = rep.statistic;
      score.chsh_std_error = rep.std_error;
    } catch (const InsufficientRuns&) {
      score.has_chsh = false;
    }
  }
  return score;
}

Strategy sign_strategy() {
  Strategy s;
  s.name = "sign";
  s.prepare = [](RngStream& rng) {
    double z = rng.next_range(-1.0, 1.0);
    double phi = rng.next_range(-3.14159265358979323846, 3.14159265358979323846);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return std::vector<double>{r * std::cos(phi), r * std::sin(phi), z};
  };
  auto project = [](const Direction& q, const std::vector<double>& note) {
    if (note.size() != 3) {
      throw StrategyViolation("sign strategy expects a 3-component note");
    }
    return q.x() * note[0] + q.y() * note[1] + q.z() * note[2];
  };
  s.answer_1 = [project](const Direction& q1, const std::vector<double>& note,
                         const std::optional<LeakObservation>&, RngStream&) {
    return sign_pm(project(q1, note));
  };
  s.answer_2 = [project](const Direction& q2, const std::vector<double>& note,
                         RngStream&) {
    return -sign_pm(project(q2, note));
  };
  return s;
}

Strategy pilot_wave_strategy() {
  Strategy s;
  s.name = "pilotwave";
  s.prepare = [](RngStream& rng) {
    double u1 = rng.next_unit();
    double u2 = rng.next_unit();
    return std::vector<double>{u1, u2};
  };
  s.answer_1 = [](const Direction& q1, const std::vector<double>& note,
                  const std::optional<LeakObservation>& leak, RngStream&) {
    if (!leak) {
      throw StrategyViolation(
          "pilotwave strategy needs the remote-question channel");
    }
    if (note.size() != 2) {
      throw StrategyViolation("pilotwave strategy expects a 2-component note");
    }
    int b_hat = note[0] < 0.5 ? +1 : -1;
    double c = (1.0 + std::cos(angle_between(q1, leak->question_2))) / 2.0;
    return note[1] < c ? -b_hat : +b_hat;
  };
  s.answer_2 = [](const Direction&, const std::vector<double>& note,
                  RngStream&) {
    if (note.size() != 2) {
      throw StrategyViolation("pilotwave strategy expects a 2-component note");
    }
    return note[0] < 0.5 ? +1 : -1;
  };
  return s;
}

const std::vector<std::string>& strategy_ids() {
  static const std::vector<std::string> ids = {"sign", "pilotwave"};
  return ids;
}

Strategy strategy_from_id(const std::string& id) {
  if (id == "sign") return sign_strategy();
  if (id == "pilotwave") return pilot_wave_strategy();
  throw InvalidArgument("unknown strategy '" + id +
                        "' (expected sign | pilotwave)");
}

SettingsPolicy game_policy() {
  GameConfig cfg = GameConfig::canonical(1, LeakChannel::None, 0);
  return grid_policy(cfg.questions_1, cfg.questions_2);
}

ModelSpec game_replay_model(const std::string& game_model_id) {
  const std::string prefix = "game:";
  if (game_model_id.rfind(prefix, 0) != 0) {
    throw InvalidArgument("not a game model id: '" + game_model_id + "'");
  }
  const std::size_t cut = game_model_id.find(':', prefix.size());
  if (cut == std::string::npos) {
    throw InvalidArgument("expected game:<strategy>:<none|remote-question>, "
                          "got '" + game_model_id + "'");
  }
  const std::string strategy_id = game_model_id.substr(prefix.size(),
                                                       cut - prefix.size());
  const std::string leak_id = game_model_id.substr(cut + 1);
  bool leak_open = false;
  if (leak_id == "remote-question") {
    leak_open = true;
  } else if (leak_id != "none") {
    throw InvalidArgument("unknown leak channel '" + leak_id +
                          "' in '" + game_model_id +
                          "' (expected none | remote-question)");
  }
  const Strategy strategy = strategy_from_id(strategy_id);

  ModelSpec m;
  m.id = game_model_id;
  // The note spaces of the shipped strategies: sign prepares a shared unit
  // vector, pilotwave two uniforms.
  if (strategy_id == "sign") {
    m.lambda_domain = UnitSphereDomain{};
  } else {
    m.lambda_domain = BoxDomain{{{0.0, 1.0}, {0.0, 1.0}}};
  }
  m.mu_a_domain = leak_open ? StateDomain(UnitSphereDomain{}) : trivial_domain();
  m.mu_b_domain = trivial_domain();

  m.sample_lambda = [prepare = strategy.prepare](const Direction&,
                                                 const Direction&,
                                                 RngStream& rng) {
    std::vector<double> note = prepare(rng);
    HiddenState h;
    h.payload = note.empty() ? trivial_state()
                             : StatePayload(ContinuousState{std::move(note)});
    return h;
  };

  m.sample_microstates = [leak_open](const Direction&, const Direction& b,
                                     const HiddenState&, RngStream&) {
    Microstate mu_a;
    mu_a.side = Side::A;
    mu_a.payload = leak_open
                       ? StatePayload(ContinuousState{{b.x(), b.y(), b.z()}})
                       : trivial_state();
    Microstate mu_b;
    mu_b.side = Side::B;
    mu_b.payload = trivial_state();
    return std::make_pair(mu_a, mu_b);
  };

  auto note_of = [](const HiddenState& lambda) -> std::vector<double> {
    if (const auto* c = std::get_if<ContinuousState>(&lambda.payload)) {
      return c->values;
    }
    return {};
  };

  m.respond_a = [answer = strategy.answer_1, note_of, leak_open](
                    const Direction& own, const HiddenState& lambda,
                    const Microstate& mu, RngStream& rng) {
    std::optional<LeakObservation> leak;
    if (leak_open) {
      const auto* c = std::get_if<ContinuousState>(&mu.payload);
      if (!c || c->values.size() != 3) {
        throw ModelFailure("replayed microstate does not hold a question");
      }
      leak = LeakObservation{
          Direction::normalized(c->values[0], c->values[1], c->values[2])};
    }
    return Outcome(answer(own, note_of(lambda), leak, rng));
  };
  m.respond_b = [answer = strategy.answer_2, note_of](
                    const Direction& own, const HiddenState& lambda,
                    const Microstate&, RngStream& rng) {
    return Outcome(answer(own, note_of(lambda), rng));
  };

  m.locality.respond_a_reads = {RespondInput::OwnSetting, RespondInput::Lambda,
                                RespondInput::OwnMicrostate,
                                RespondInput::OwnRng};
  m.locality.respond_b_reads = {RespondInput::OwnSetting, RespondInput::Lambda,
                                RespondInput::OwnRng};

  m.validate();
  return m;
}

}  // namespace bellsim
