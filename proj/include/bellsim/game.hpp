#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bellsim/direction.hpp"
#include "bellsim/ensemble.hpp"
#include "bellsim/model_spec.hpp"
#include "bellsim/rng.hpp"

namespace bellsim {

// Two players answer +1/-1 to direction-valued questions drawn independently
// each round. They share a prepared note but cannot communicate once the
// questions are dealt, except through an explicitly configured leak channel.
enum class LeakChannel {
  None,
  // Player 1 sees player 2's question before answering (a perfect one-way
  // side channel).
  RemoteQuestion,
};

struct GameConfig {
  std::vector<Direction> questions_1;
  std::vector<Direction> questions_2;
  std::uint64_t rounds = 10000;
  LeakChannel leak = LeakChannel::None;
  std::uint64_t seed = 0;

  // The four-direction configuration whose pair targets -cos(theta) sum to
  // the maximal CHSH value.
  static GameConfig canonical(std::uint64_t rounds, LeakChannel leak,
                              std::uint64_t seed);
};

struct LeakObservation {
  Direction question_2;
};

struct Strategy {
  std::string name;
  // Run once per round before the questions are dealt; the returned note is
  // the only shared state.
  std::function<std::vector<double>(RngStream&)> prepare;
  // Player 1. `leak` is engaged only when the channel is open; strategies
  // that cannot play without it throw StrategyViolation.
  std::function<int(const Direction& q1, const std::vector<double>& note,
                    const std::optional<LeakObservation>& leak, RngStream&)>
      answer_1;
  // Player 2 never sees the channel.
  std::function<int(const Direction& q2, const std::vector<double>& note,
                    RngStream&)>
      answer_2;
};

struct PairScore {
  Direction q1{1, 0, 0};
  Direction q2{1, 0, 0};
  std::uint64_t n = 0;
  double e = 0.0;       // mean answer product
  double target = 0.0;  // -cos(angle between questions)
};

struct GameScore {
  std::vector<PairScore> pairs;
  double max_abs_deviation = 0.0;  // max |e - target| over played pairs
  bool has_chsh = false;           // canonical four directions present
  double chsh = 0.0;
  double chsh_std_error = 0.0;
  // Round-by-round transcript in the same shape the simulator emits: the note
  // is recorded as the hidden state, the leaked question (if any) as player
  // 1's microstate.
  Ensemble transcript;
};

// Plays `rounds` rounds, questions drawn uniformly from the cross product.
// Throws StrategyViolation if an answer is not +1/-1 (or the strategy itself
// throws, e.g. when it requires a closed channel).
GameScore play_game(const GameConfig& config, const Strategy& strategy);

// Shared random direction; answer k = sign(q_k . note), negated for player 2.
// Best leak-free strategy of this family; deviates from the singlet targets
// by about 0.207 at 45 degrees.
Strategy sign_strategy();

// Replays the microstate-leak construction: the note holds two uniforms,
// player 2 answers a coin from the first, player 1 uses the leaked question
// to flip against that coin. Requires the channel; throws without it.
Strategy pilot_wave_strategy();

const std::vector<std::string>& strategy_ids();
Strategy strategy_from_id(const std::string& id);

// The question grid canonical games are played on, as a settings policy.
SettingsPolicy game_policy();

// Rebuilds a strategy as an ordinary model: lambda is the prepared note,
// mu_a carries the leaked question when the channel is open, and the
// responders replay the strategy's answer functions. This is what lets
// recorded transcripts (model_id "game:<strategy>:<none|remote-question>")
// flow through the same estimators and auditors as simulated ensembles.
// Throws InvalidArgument on a malformed id or unknown strategy.
ModelSpec game_replay_model(const std::string& game_model_id);

}  // namespace bellsim
