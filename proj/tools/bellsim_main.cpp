// bellsim: simulate Bell-type experiments over pluggable hidden-variable
// models, estimate correlations and the CHSH statistic, and audit recorded
// or exact distributions for locality-style independence conditions.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bellsim/auditors.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/estimators.hpp"
#include "bellsim/game.hpp"
#include "bellsim/models.hpp"
#include "bellsim/ndjson.hpp"
#include "bellsim/reports.hpp"
#include "bellsim/runner.hpp"
#include "bellsim/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadArgs = 2;
constexpr int kExitModelFailure = 3;

constexpr double kPi = 3.14159265358979323846;

std::string now_stamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc;
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Send report text to --out (atomic) or stdout. Timestamps go to stderr only,
// so identical runs produce byte-identical files.
void deliver(const std::string& text, const std::string& out_path,
             const char* what) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  bellsim::atomic_write_file(out_path, text);
  std::cerr << "bellsim: wrote " << what << " to " << out_path << " at "
            << now_stamp() << "\n";
}

struct GeometryArgs {
  bool paper_config = false;
  bool radians = false;
  std::vector<double> angles;  // a, a', b, b' as in-plane azimuths

  bellsim::PaperDirections resolve() const {
    if (!angles.empty() && angles.size() != 4) {
      throw bellsim::InvalidArgument(
          "--angles needs exactly four azimuths: a,a',b,b'");
    }
    if (angles.empty() || paper_config) {
      return bellsim::paper_configuration();
    }
    double scale = radians ? 1.0 : kPi / 180.0;
    return bellsim::PaperDirections{
        bellsim::Direction::from_azimuth(angles[0] * scale),
        bellsim::Direction::from_azimuth(angles[1] * scale),
        bellsim::Direction::from_azimuth(angles[2] * scale),
        bellsim::Direction::from_azimuth(angles[3] * scale)};
  }

  bellsim::SettingsPolicy policy() const {
    auto d = resolve();
    bellsim::SettingsPolicy p;
    p.id = (angles.empty() || paper_config) ? "paper" : "custom";
    p.pairs = {{d.a, d.b}, {d.a, d.b_prime}, {d.a_prime, d.b}, {d.a_prime, d.b_prime}};
    p.weights = {0.25, 0.25, 0.25, 0.25};
    return p;
  }
};

void add_geometry_flags(CLI::App* cmd, GeometryArgs& geo) {
  cmd->add_flag("--paper-config", geo.paper_config,
                "Use the canonical maximally-violating four directions (default)");
  cmd->add_option("--angles", geo.angles,
                  "Custom in-plane azimuths a,a',b,b' (degrees unless --radians)")
      ->expected(4)
      ->delimiter(',');
  cmd->add_flag("--radians", geo.radians, "Interpret angles as radians");
}

std::vector<double> parse_grid(const std::string& grid, bool radians) {
  double start = 0.0, stop = 0.0;
  std::size_t count = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(grid);
  if (!(in >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':' ||
      !in.eof() || count == 0) {
    throw bellsim::InvalidArgument("--grid must be start:stop:count, e.g. 0:180:7");
  }
  double scale = radians ? 1.0 : kPi / 180.0;
  std::vector<double> thetas;
  thetas.reserve(count);
  if (count == 1) {
    thetas.push_back(start * scale);
    return thetas;
  }
  for (std::size_t i = 0; i < count; ++i) {
    double t = start + (stop - start) * static_cast<double>(i) /
                           static_cast<double>(count - 1);
    thetas.push_back(t * scale);
  }
  return thetas;
}

bellsim::Condition condition_from_name(const std::string& name) {
  using bellsim::Condition;
  for (Condition c : {Condition::Factorizability, Condition::SettingsIndependence,
                      Condition::MicrostateIndependence,
                      Condition::ParameterIndependence,
                      Condition::OutcomeIndependence, Condition::StructuralLocality,
                      Condition::InvertedOiPattern}) {
    if (name == bellsim::condition_name(c)) return c;
  }
  throw bellsim::InvalidArgument("unknown condition '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bell-experiment simulator and statistical audit engine"};
  app.set_version_flag("--version", bellsim::kToolVersion);
  app.require_subcommand(1);

  // ---- simulate ----
  auto* sim = app.add_subcommand(
      "simulate", "Generate an ensemble of runs and write it as NDJSON");
  sim->set_config("--config", "", "Read options from a key=value file");
  struct {
    std::string model;
    std::uint64_t n = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out;
  } sim_args;
  sim->add_option("--model", sim_args.model,
                  "Model id: singlet | sign | leak | resultleak | "
                  "dice:w1,w2[,...] | randfac:k:seed")
      ->required();
  sim->add_option("--n", sim_args.n, "Number of runs")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_args.seed, "Master seed");
  sim->add_option("--threads", sim_args.threads, "Worker threads (output is identical)")
      ->check(CLI::PositiveNumber);
  sim->add_option("--out", sim_args.out, "Output path (default stdout)");

  // ---- chsh ----
  auto* chsh = app.add_subcommand(
      "chsh", "Compute the CHSH statistic, exactly or by simulation");
  chsh->set_config("--config", "", "Read options from a key=value file");
  struct {
    std::string model;
    std::string in;
    bool exact = false;
    bool empirical = false;
    std::uint64_t n = 100000;
    std::uint64_t seed = 0;
    std::string out;
    GeometryArgs geo;
  } chsh_args;
  chsh->add_option("--model", chsh_args.model, "Model id");
  chsh->add_option("--in", chsh_args.in, "Estimate from a recorded NDJSON ensemble");
  chsh->add_flag("--exact", chsh_args.exact, "Exact mode (default with --model)");
  chsh->add_flag("--empirical", chsh_args.empirical,
                 "Simulate --n runs and estimate");
  chsh->add_option("--n", chsh_args.n, "Runs for --empirical")
      ->check(CLI::PositiveNumber);
  chsh->add_option("--seed", chsh_args.seed, "Master seed for --empirical");
  chsh->add_option("--out", chsh_args.out, "Output path (default stdout)");
  add_geometry_flags(chsh, chsh_args.geo);

  // ---- audit ----
  auto* audit = app.add_subcommand(
      "audit", "Audit a model or recorded ensemble for independence conditions");
  audit->set_config("--config", "", "Read options from a key=value file");
  struct {
    std::string model;
    std::string in;
    bool exact = false;
    bool empirical = false;
    std::string condition = "all";
    std::uint64_t n = 100000;
    std::uint64_t seed = 0;
    unsigned bins = 16;
    double alpha = 1e-3;
    std::string out;
  } audit_args;
  audit->add_option("--model", audit_args.model, "Model id");
  audit->add_option("--in", audit_args.in, "Audit a recorded NDJSON ensemble");
  audit->add_flag("--exact", audit_args.exact,
                  "Exact mode from the model's joint table (default with --model)");
  audit->add_flag("--empirical", audit_args.empirical,
                  "Simulate --n runs and audit the sample");
  audit->add_option("--condition", audit_args.condition,
                    "One condition name, or 'all'");
  audit->add_option("--n", audit_args.n, "Runs for --empirical")
      ->check(CLI::PositiveNumber);
  audit->add_option("--seed", audit_args.seed, "Master seed for --empirical");
  audit->add_option("--bins", audit_args.bins, "Bins per state dimension")
      ->check(CLI::PositiveNumber);
  audit->add_option("--alpha", audit_args.alpha, "Significance level")
      ->check(CLI::Range(0.0, 1.0));
  audit->add_option("--out", audit_args.out, "Output path (default stdout)");

  // ---- game ----
  auto* game = app.add_subcommand(
      "game", "Play the two-player question game with a shipped strategy");
  game->set_config("--config", "", "Read options from a key=value file");
  struct {
    std::string strategy;
    std::uint64_t rounds = 10000;
    std::uint64_t seed = 0;
    bool leak = false;
    std::string transcript;
    std::string out;
  } game_args;
  game->add_option("--strategy", game_args.strategy, "sign | pilotwave")
      ->required();
  game->add_option("--n,--rounds", game_args.rounds, "Rounds to play")
      ->check(CLI::PositiveNumber);
  game->add_option("--seed", game_args.seed, "Master seed");
  game->add_flag("--leak", game_args.leak,
                 "Open the channel that shows player 1 the remote question");
  game->add_option("--transcript", game_args.transcript,
                   "Write the round transcript as NDJSON");
  game->add_option("--out", game_args.out, "Score report path (default stdout)");

  // ---- sweep ----
  auto* sweep = app.add_subcommand(
      "sweep", "Tabulate E(theta) exactly and by simulation over an angle grid");
  sweep->set_config("--config", "", "Read options from a key=value file");
  struct {
    std::string model;
    std::string grid = "0:180:7";
    bool radians = false;
    std::uint64_t n = 20000;
    std::uint64_t seed = 0;
    std::string out;
  } sweep_args;
  sweep->add_option("--model", sweep_args.model, "Model id")->required();
  sweep->add_option("--grid", sweep_args.grid,
                    "Angle grid start:stop:count (degrees unless --radians)");
  sweep->add_flag("--radians", sweep_args.radians, "Interpret --grid as radians");
  sweep->add_option("--n", sweep_args.n, "Runs per grid point")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_args.seed, "Master seed");
  sweep->add_option("--out", sweep_args.out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadArgs;
  }

  try {
    if (sim->parsed()) {
      bellsim::ModelSpec model = bellsim::models::build_from_id(sim_args.model);
      bellsim::SettingsPolicy policy =
          bellsim::models::default_policy_for(sim_args.model);
      bellsim::Ensemble ens = bellsim::run_experiment(
          model, policy, sim_args.n, sim_args.seed, sim_args.threads);
      deliver(bellsim::to_ndjson(ens, "simulate"), sim_args.out, "ensemble");
      return kExitOk;
    }

    if (chsh->parsed()) {
      if (chsh_args.exact && chsh_args.empirical) {
        throw bellsim::InvalidArgument("--exact and --empirical are exclusive");
      }
      auto dirs = chsh_args.geo.resolve();
      bellsim::ChshReport rep;
      if (!chsh_args.in.empty()) {
        bellsim::Ensemble ens = bellsim::read_ndjson_file(chsh_args.in);
        rep = bellsim::chsh_statistic(ens, dirs);
      } else if (chsh_args.model.empty()) {
        throw bellsim::InvalidArgument("chsh needs --model or --in");
      } else {
        bellsim::ModelSpec model = bellsim::models::build_from_id(chsh_args.model);
        if (chsh_args.empirical) {
          bellsim::Ensemble ens = bellsim::run_experiment(
              model, chsh_args.geo.policy(), chsh_args.n, chsh_args.seed);
          rep = bellsim::chsh_statistic(ens, dirs);
        } else {
          rep = bellsim::chsh_statistic(model, dirs);
        }
      }
      deliver(bellsim::chsh_to_json(rep), chsh_args.out, "chsh report");
      return kExitOk;
    }

    if (audit->parsed()) {
      if (audit_args.exact && audit_args.empirical) {
        throw bellsim::InvalidArgument("--exact and --empirical are exclusive");
      }
      if (audit_args.in.empty() && audit_args.model.empty()) {
        throw bellsim::InvalidArgument("audit needs --model or --in");
      }
      if (!audit_args.in.empty() && audit_args.exact) {
        throw bellsim::InvalidArgument(
            "--exact audits the model's joint table; it cannot take --in");
      }

      bellsim::AuditOptions opt;
      opt.alpha = audit_args.alpha;
      opt.bins = audit_args.bins;

      std::optional<bellsim::Condition> only;
      if (audit_args.condition != "all") {
        only = condition_from_name(audit_args.condition);
      }

      std::string model_id = audit_args.model;
      std::optional<bellsim::Ensemble> ens;
      if (!audit_args.in.empty()) {
        ens = bellsim::read_ndjson_file(audit_args.in);
        model_id = ens->model_id;
      }
      bellsim::ModelSpec model = bellsim::models::build_from_id(model_id);
      bellsim::SettingsPolicy policy =
          bellsim::models::default_policy_for(model_id);
      bool empirical = audit_args.empirical || ens.has_value();

      std::vector<bellsim::AuditVerdict> verdicts;
      auto want = [&](bellsim::Condition c) { return !only || *only == c; };

      if (empirical) {
        if (!ens) {
          ens = bellsim::run_experiment(model, policy, audit_args.n,
                                        audit_args.seed);
        }
        bellsim::BinnedEnsemble binned(*ens, bellsim::domains_of(model),
                                       opt.bins);
        if (want(bellsim::Condition::Factorizability))
          verdicts.push_back(bellsim::audit_factorizability(binned, opt));
        if (want(bellsim::Condition::SettingsIndependence))
          verdicts.push_back(bellsim::audit_settings_independence(binned, opt));
        if (want(bellsim::Condition::MicrostateIndependence))
          verdicts.push_back(bellsim::audit_microstate_independence(binned, opt));
        if (want(bellsim::Condition::ParameterIndependence))
          verdicts.push_back(bellsim::audit_parameter_independence(binned, opt));
        if (want(bellsim::Condition::OutcomeIndependence))
          verdicts.push_back(bellsim::audit_outcome_independence(binned, opt));
        if (want(bellsim::Condition::InvertedOiPattern))
          verdicts.push_back(bellsim::audit_inverted_oi_pattern(binned, opt));
      } else {
        if (!model.exact_table) {
          throw bellsim::NoExactInterface("model '" + model_id +
                                          "' has no exact joint table");
        }
        auto table = model.exact_table(policy);
        if (!table) {
          throw bellsim::NoExactInterface(
              "model '" + model_id +
              "' cannot build an exact joint table under policy '" + policy.id +
              "'");
        }
        if (want(bellsim::Condition::Factorizability))
          verdicts.push_back(bellsim::audit_factorizability(*table, opt.tol));
        if (want(bellsim::Condition::SettingsIndependence))
          verdicts.push_back(bellsim::audit_settings_independence(*table, opt.tol));
        if (want(bellsim::Condition::MicrostateIndependence))
          verdicts.push_back(
              bellsim::audit_microstate_independence(*table, opt.tol));
        if (want(bellsim::Condition::ParameterIndependence))
          verdicts.push_back(
              bellsim::audit_parameter_independence(*table, opt.tol));
        if (want(bellsim::Condition::OutcomeIndependence))
          verdicts.push_back(bellsim::audit_outcome_independence(*table, opt.tol));
        if (want(bellsim::Condition::InvertedOiPattern))
          verdicts.push_back(bellsim::audit_inverted_oi_pattern(*table, opt.tol));
      }
      if (want(bellsim::Condition::StructuralLocality)) {
        verdicts.push_back(bellsim::audit_structural_locality(model, policy));
      }

      deliver(bellsim::audits_to_json(verdicts), audit_args.out, "audit report");
      return kExitOk;
    }

    if (game->parsed()) {
      bellsim::Strategy strategy =
          bellsim::strategy_from_id(game_args.strategy);
      bellsim::GameConfig cfg = bellsim::GameConfig::canonical(
          game_args.rounds,
          game_args.leak ? bellsim::LeakChannel::RemoteQuestion
                         : bellsim::LeakChannel::None,
          game_args.seed);
      bellsim::GameScore score = bellsim::play_game(cfg, strategy);
      if (!game_args.transcript.empty()) {
        bellsim::atomic_write_file(
            game_args.transcript,
            bellsim::to_ndjson(score.transcript, "game"));
        std::cerr << "bellsim: wrote transcript to " << game_args.transcript
                  << " at " << now_stamp() << "\n";
      }
      deliver(bellsim::game_to_json(score), game_args.out, "game score");
      return kExitOk;
    }

    if (sweep->parsed()) {
      bellsim::ModelSpec model = bellsim::models::build_from_id(sweep_args.model);
      auto thetas = parse_grid(sweep_args.grid, sweep_args.radians);
      auto rows = bellsim::sweep_expectation(model, thetas, sweep_args.n,
                                             sweep_args.seed);
      deliver(bellsim::sweep_to_csv(rows), sweep_args.out, "sweep table");
      return kExitOk;
    }
  } catch (const bellsim::ModelFailure& e) {
    std::cerr << "bellsim: model failure: " << e.what() << "\n";
    return kExitModelFailure;
  } catch (const bellsim::StrategyViolation& e) {
    std::cerr << "bellsim: strategy violation: " << e.what() << "\n";
    return kExitModelFailure;
  } catch (const bellsim::Error& e) {
    std::cerr << "bellsim: " << e.what() << "\n";
    return kExitBadArgs;
  } catch (const std::exception& e) {
    std::cerr << "bellsim: " << e.what() << "\n";
    return kExitBadArgs;
  }

  return kExitOk;
}
