// _bellsim: thin pybind11 layer over the C++ core. Report-shaped results are
// returned as JSON strings and parsed into dicts by the bellsim package, so
// the wire format here is identical to the CLI's.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellsim/auditors.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/estimators.hpp"
#include "bellsim/game.hpp"
#include "bellsim/models.hpp"
#include "bellsim/ndjson.hpp"
#include "bellsim/reports.hpp"
#include "bellsim/runner.hpp"
#include "bellsim/version.hpp"

namespace py = pybind11;

namespace {

bellsim::Direction direction_of(const std::vector<double>& v) {
  if (v.size() != 3) {
    throw bellsim::InvalidArgument("a direction needs exactly 3 components");
  }
  return bellsim::Direction::normalized(v[0], v[1], v[2]);
}

std::string simulate_ndjson(const std::string& model_id, std::uint64_t n,
                            std::uint64_t seed, unsigned threads) {
  bellsim::ModelSpec model = bellsim::models::build_from_id(model_id);
  bellsim::SettingsPolicy policy = bellsim::models::default_policy_for(model_id);
  bellsim::Ensemble ens =
      bellsim::run_experiment(model, policy, n, seed, threads);
  return bellsim::to_ndjson(ens, "simulate");
}

std::string chsh_exact_json(const std::string& model_id) {
  bellsim::ModelSpec model = bellsim::models::build_from_id(model_id);
  return bellsim::chsh_to_json(
      bellsim::chsh_statistic(model, bellsim::paper_configuration()));
}

std::string chsh_mc_json(const std::string& model_id, std::uint64_t n,
                         std::uint64_t seed) {
  bellsim::ModelSpec model = bellsim::models::build_from_id(model_id);
  auto dirs = bellsim::paper_configuration();
  bellsim::SettingsPolicy policy;
  policy.id = "paper";
  policy.pairs = {{dirs.a, dirs.b},
                  {dirs.a, dirs.b_prime},
                  {dirs.a_prime, dirs.b},
                  {dirs.a_prime, dirs.b_prime}};
  policy.weights = {0.25, 0.25, 0.25, 0.25};
  bellsim::Ensemble ens = bellsim::run_experiment(model, policy, n, seed);
  return bellsim::chsh_to_json(bellsim::chsh_statistic(ens, dirs));
}

std::string chsh_data_json(const std::string& ndjson_text) {
  bellsim::Ensemble ens = bellsim::ndjson_from_string(ndjson_text);
  return bellsim::chsh_to_json(
      bellsim::chsh_statistic(ens, bellsim::paper_configuration()));
}

double exact_e(const std::string& model_id, const std::vector<double>& a,
               const std::vector<double>& b) {
  bellsim::ModelSpec model = bellsim::models::build_from_id(model_id);
  return bellsim::exact_expectation(model, direction_of(a), direction_of(b))
      .value;
}

// Mirrors the CLI: the six distribution-level conditions in declaration
// order, then the structural pass over the model's wiring.
std::string audit_exact_json(const std::string& model_id, double tol) {
  bellsim::ModelSpec model = bellsim::models::build_from_id(model_id);
  bellsim::SettingsPolicy policy = bellsim::models::default_policy_for(model_id);
  if (!model.exact_table) {
    throw bellsim::NoExactInterface("model '" + model_id +
                                    "' has no exact joint table");
  }
  auto table = model.exact_table(policy);
  if (!table) {
    throw bellsim::NoExactInterface(
        "model '" + model_id +
        "' cannot build an exact joint table under policy '" + policy.id + "'");
  }
  std::vector<bellsim::AuditVerdict> verdicts;
  verdicts.push_back(bellsim::audit_factorizability(*table, tol));
  verdicts.push_back(bellsim::audit_settings_independence(*table, tol));
  verdicts.push_back(bellsim::audit_microstate_independence(*table, tol));
  verdicts.push_back(bellsim::audit_parameter_independence(*table, tol));
  verdicts.push_back(bellsim::audit_outcome_independence(*table, tol));
  verdicts.push_back(bellsim::audit_inverted_oi_pattern(*table, tol));
  verdicts.push_back(bellsim::audit_structural_locality(model, policy));
  return bellsim::audits_to_json(verdicts);
}

std::string audit_binned(const bellsim::ModelSpec& model,
                         const bellsim::Ensemble& ens,
                         const bellsim::AuditOptions& opt) {
  bellsim::BinnedEnsemble binned(ens, bellsim::domains_of(model), opt.bins);
  std::vector<bellsim::AuditVerdict> verdicts;
  verdicts.push_back(bellsim::audit_factorizability(binned, opt));
  verdicts.push_back(bellsim::audit_settings_independence(binned, opt));
  verdicts.push_back(bellsim::audit_microstate_independence(binned, opt));
  verdicts.push_back(bellsim::audit_parameter_independence(binned, opt));
  verdicts.push_back(bellsim::audit_outcome_independence(binned, opt));
  verdicts.push_back(bellsim::audit_inverted_oi_pattern(binned, opt));
  verdicts.push_back(
      bellsim::audit_structural_locality(model, bellsim::models::default_policy_for(ens.model_id)));
  return bellsim::audits_to_json(verdicts);
}

std::string audit_empirical_json(const std::string& model_id, std::uint64_t n,
                                 std::uint64_t seed, unsigned bins,
                                 double alpha) {
  bellsim::ModelSpec model = bellsim::models::build_from_id(model_id);
  bellsim::SettingsPolicy policy = bellsim::models::default_policy_for(model_id);
  bellsim::Ensemble ens = bellsim::run_experiment(model, policy, n, seed);
  bellsim::AuditOptions opt;
  opt.bins = bins;
  opt.alpha = alpha;
  return audit_binned(model, ens, opt);
}

std::string audit_data_json(const std::string& ndjson_text, unsigned bins,
                            double alpha) {
  bellsim::Ensemble ens = bellsim::ndjson_from_string(ndjson_text);
  bellsim::ModelSpec model = bellsim::models::build_from_id(ens.model_id);
  bellsim::AuditOptions opt;
  opt.bins = bins;
  opt.alpha = alpha;
  return audit_binned(model, ens, opt);
}

py::tuple game_json(const std::string& strategy_id, std::uint64_t rounds,
                    bool leak, std::uint64_t seed) {
  bellsim::Strategy strategy = bellsim::strategy_from_id(strategy_id);
  bellsim::GameConfig cfg = bellsim::GameConfig::canonical(
      rounds,
      leak ? bellsim::LeakChannel::RemoteQuestion : bellsim::LeakChannel::None,
      seed);
  bellsim::GameScore score = bellsim::play_game(cfg, strategy);
  return py::make_tuple(bellsim::game_to_json(score),
                        bellsim::to_ndjson(score.transcript, "game"));
}

std::string sweep_csv(const std::string& model_id,
                      const std::vector<double>& thetas, std::uint64_t n,
                      std::uint64_t seed) {
  bellsim::ModelSpec model = bellsim::models::build_from_id(model_id);
  return bellsim::sweep_to_csv(
      bellsim::sweep_expectation(model, thetas, n, seed));
}

std::string theorem_chain_json(std::size_t n_models, std::size_t k_max,
                               std::uint64_t seed, double tol) {
  return bellsim::theorem_chain_to_json(
      bellsim::audit_theorem_chain(n_models, k_max, seed, tol));
}

std::vector<std::string> zoo_ids() {
  std::vector<std::string> ids;
  for (const auto& d : bellsim::models::zoo()) ids.push_back(d.model_id);
  return ids;
}

}  // namespace

PYBIND11_MODULE(_bellsim, m) {
  m.doc() =
      "Simulator and statistical audit engine for Bell-type experiments over "
      "pluggable hidden-variable models (C++ core).";

  py::register_exception<bellsim::InvalidArgument>(m, "InvalidArgument",
                                                   PyExc_ValueError);
  py::register_exception<bellsim::ParseError>(m, "ParseError",
                                              PyExc_ValueError);

  m.def("version", [] { return std::string(bellsim::kToolVersion); },
        "Library version string.");

  m.def("simulate_ndjson", &simulate_ndjson, py::arg("model_id"), py::arg("n"),
        py::arg("seed") = 0, py::arg("threads") = 1,
        "Run the model under its default settings policy and return the "
        "ensemble as NDJSON (header line + one record per run). Output is "
        "byte-identical for a given (model_id, n, seed) at any thread count.");

  m.def("chsh_exact_json", &chsh_exact_json, py::arg("model_id"),
        "CHSH report at the canonical four directions, exact mode.");
  m.def("chsh_mc_json", &chsh_mc_json, py::arg("model_id"), py::arg("n"),
        py::arg("seed") = 0,
        "CHSH report estimated from a fresh simulated ensemble.");
  m.def("chsh_data_json", &chsh_data_json, py::arg("ndjson_text"),
        "CHSH report estimated from a serialized ensemble.");

  m.def("exact_e", &exact_e, py::arg("model_id"), py::arg("a"), py::arg("b"),
        "Exact correlation E(a, b) for unit 3-vectors a and b.");

  m.def("audit_exact_json", &audit_exact_json, py::arg("model_id"),
        py::arg("tol") = 1e-9,
        "Audit the model's exact joint table for every independence "
        "condition, plus the structural wiring check.");
  m.def("audit_empirical_json", &audit_empirical_json, py::arg("model_id"),
        py::arg("n"), py::arg("seed") = 0, py::arg("bins") = 16,
        py::arg("alpha") = 1e-3,
        "Simulate n runs and audit the sample statistically.");
  m.def("audit_data_json", &audit_data_json, py::arg("ndjson_text"),
        py::arg("bins") = 16, py::arg("alpha") = 1e-3,
        "Audit a serialized ensemble; the model named in the header supplies "
        "the state domains for binning.");

  m.def("game_json", &game_json, py::arg("strategy_id"), py::arg("rounds"),
        py::arg("leak") = false, py::arg("seed") = 0,
        "Play the two-player question game; returns (score_json, "
        "transcript_ndjson).");

  m.def("sweep_csv", &sweep_csv, py::arg("model_id"), py::arg("thetas"),
        py::arg("n") = 20000, py::arg("seed") = 0,
        "CSV table of E(theta) exact and Monte Carlo over the given angles "
        "(radians).");

  m.def("theorem_chain_json", &theorem_chain_json, py::arg("n_models") = 50,
        py::arg("k_max") = 8, py::arg("seed") = 0, py::arg("tol") = 1e-12,
        "End-to-end bound check: random factorizable models stay at or below "
        "2, the microstate-leak model saturates 2*sqrt(2), its ablation drops "
        "back inside the bound.");

  m.def("zoo_ids", &zoo_ids, "Model ids of the canonical zoo instances.");
  m.def("strategy_ids", [] { return bellsim::strategy_ids(); },
        "Shipped game strategy ids.");
}
