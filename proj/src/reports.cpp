#include "bellsim/reports.hpp"

#include <json.hpp>
#include <sstream>

namespace bellsim {

namespace {

using json = nlohmann::ordered_json;

const char* method_name(Method m) {
  return m == Method::Exact ? "exact" : "mc";
}

json expectation_json(const ExpectationEstimate& est) {
  json j;
  j["E"] = est.value;
  j["stderr"] = est.std_error;
  j["n"] = est.n;
  j["method"] = method_name(est.method);
  return j;
}

json audit_json(const AuditVerdict& v) {
  json j;
  j["condition"] = condition_name(v.condition);
  j["mode"] = v.mode == AuditMode::Exact ? "exact" : "empirical";
  j["passed"] = v.passed;
  if (v.inconclusive) j["inconclusive"] = true;
  j["divergence"] = v.divergence;
  if (v.p_value) j["p_value"] = *v.p_value;
  if (v.secondary_divergence) j["secondary_divergence"] = *v.secondary_divergence;
  j["witness"] = v.witness;
  j["cells_tested"] = v.cells_tested;
  j["cells_skipped"] = v.cells_skipped;
  return j;
}

json dir_json(const Direction& d) { return json::array({d.x(), d.y(), d.z()}); }

}  // namespace

std::string expectation_to_json(const ExpectationEstimate& est) {
  return expectation_json(est).dump();
}

std::string chsh_to_json(const ChshReport& rep) {
  json j;
  j["E_ab"] = rep.e_ab.value;
  j["E_abp"] = rep.e_abp.value;
  j["E_apb"] = rep.e_apb.value;
  j["E_apbp"] = rep.e_apbp.value;
  j["S"] = rep.statistic;
  j["stderr"] = rep.std_error;
  j["method"] = method_name(rep.method);
  return j.dump();
}

std::string audit_to_json(const AuditVerdict& verdict) {
  return audit_json(verdict).dump();
}

std::string audits_to_json(const std::vector<AuditVerdict>& verdicts) {
  json arr = json::array();
  for (const auto& v : verdicts) arr.push_back(audit_json(v));
  json j;
  j["audits"] = arr;
  // the inverted-OI entry is a pattern detector, not a condition a model is
  // expected to satisfy, so it does not gate the summary verdict
  bool all = true;
  bool any_inconclusive = false;
  for (const auto& v : verdicts) {
    if (v.condition == Condition::InvertedOiPattern) continue;
    all = all && v.passed;
    any_inconclusive = any_inconclusive || v.inconclusive;
  }
  j["all_passed"] = all && !any_inconclusive;
  if (any_inconclusive) j["inconclusive"] = true;
  return j.dump();
}

std::string theorem_chain_to_json(const TheoremChainReport& rep) {
  json rows = json::array();
  for (const auto& row : rep.factorizable_rows) {
    json r;
    r["model_id"] = row.model_id;
    r["factorizability"] = row.factorizability;
    r["settings_independence"] = row.settings_independence;
    r["microstate_independence"] = row.microstate_independence;
    r["chsh"] = row.chsh;
    r["chsh_bounded"] = row.chsh_bounded;
    rows.push_back(r);
  }
  json j;
  j["factorizable_models"] = rows;
  j["max_factorizable_chsh"] = rep.max_factorizable_chsh;
  j["factorizable_all_pass"] = rep.factorizable_all_pass;
  j["leak"] = {{"structural_locality", rep.leak_structural_locality},
               {"settings_independence", rep.leak_settings_independence},
               {"microstate_independence", rep.leak_microstate_independence},
               {"chsh", rep.leak_chsh},
               {"saturates", rep.leak_saturates}};
  j["ablated"] = {{"microstate_independence", rep.ablated_microstate_independence},
                  {"chsh", rep.ablated_chsh},
                  {"bounded", rep.ablated_bounded}};
  j["all_passed"] = rep.all_passed;
  return j.dump();
}

std::string game_to_json(const GameScore& score) {
  json pairs = json::array();
  for (const auto& p : score.pairs) {
    json pj;
    pj["q1"] = dir_json(p.q1);
    pj["q2"] = dir_json(p.q2);
    pj["n"] = p.n;
    pj["E"] = p.e;
    pj["target"] = p.target;
    pairs.push_back(pj);
  }
  json j;
  j["model_id"] = score.transcript.model_id;
  j["rounds"] = score.transcript.runs.size();
  j["pairs"] = pairs;
  j["max_abs_deviation"] = score.max_abs_deviation;
  if (score.has_chsh) {
    j["chsh"] = score.chsh;
    j["chsh_stderr"] = score.chsh_std_error;
  }
  return j.dump();
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "theta_rad,E_exact,E_mc,stderr\n";
  for (const auto& row : rows) {
    out << row.theta << "," << row.e_exact << "," << row.e_mc << ","
        << row.std_error << "\n";
  }
  return out.str();
}

}  // namespace bellsim
