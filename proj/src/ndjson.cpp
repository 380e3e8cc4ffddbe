#include "bellsim/ndjson.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bellsim/errors.hpp"
#include "bellsim/version.hpp"

namespace bellsim {

namespace {

using json = nlohmann::ordered_json;

json state_to_json(const StatePayload& payload) {
  json j;
  if (const auto* d = std::get_if<DiscreteState>(&payload)) {
    j["d"] = d->index;
  } else {
    const auto& c = std::get<ContinuousState>(payload);
    j["c"] = c.values;
  }
  return j;
}

StatePayload state_from_json(const json& j) {
  if (j.contains("d")) return DiscreteState{j.at("d").get<std::uint64_t>()};
  if (j.contains("c")) {
    return ContinuousState{j.at("c").get<std::vector<double>>()};
  }
  throw ParseError("state object must contain \"d\" or \"c\"");
}

json policy_to_json(const SettingsPolicy& p) {
  json jp;
  jp["pairs"] = json::array();
  for (const auto& [a, b] : p.pairs) {
    jp["pairs"].push_back(
        {{"a", {a.x(), a.y(), a.z()}}, {"b", {b.x(), b.y(), b.z()}}});
  }
  jp["weights"] = p.weights;
  return jp;
}

SettingsPolicy policy_from_json(const json& jp, const std::string& id) {
  SettingsPolicy p;
  p.id = id;
  for (const auto& jpair : jp.at("pairs")) {
    const auto a = jpair.at("a").get<std::vector<double>>();
    const auto b = jpair.at("b").get<std::vector<double>>();
    if (a.size() != 3 || b.size() != 3) {
      throw ParseError("policy pair components must have length 3");
    }
    p.pairs.emplace_back(Direction(a[0], a[1], a[2]), Direction(b[0], b[1], b[2]));
  }
  p.weights = jp.at("weights").get<std::vector<double>>();
  p.validate();
  return p;
}

}  // namespace

void write_ndjson(const Ensemble& ensemble, std::ostream& out,
                  const std::string& command) {
  json header;
  header["format"] = "bellsim/ensemble";
  header["version"] = kToolVersion;
  header["command"] = command;
  header["model_id"] = ensemble.model_id;
  header["settings_policy_id"] = ensemble.settings_policy_id;
  header["policy"] = policy_to_json(ensemble.policy);
  header["master_seed"] = ensemble.master_seed;
  header["n_runs"] = ensemble.runs.size();
  out << header.dump() << '\n';

  for (const auto& r : ensemble.runs) {
    json j;
    j["run"] = r.run_index;
    j["ax"] = r.setting_a.x();
    j["ay"] = r.setting_a.y();
    j["az"] = r.setting_a.z();
    j["bx"] = r.setting_b.x();
    j["by"] = r.setting_b.y();
    j["bz"] = r.setting_b.z();
    j["A"] = r.outcome_a.value();
    j["B"] = r.outcome_b.value();
    j["lambda"] = state_to_json(r.lambda.payload);
    j["mu_a"] = state_to_json(r.mu_a.payload);
    j["mu_b"] = state_to_json(r.mu_b.payload);
    out << j.dump() << '\n';
  }
}

std::string to_ndjson(const Ensemble& ensemble, const std::string& command) {
  std::ostringstream os;
  write_ndjson(ensemble, os, command);
  return os.str();
}

Ensemble read_ndjson(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty ndjson input");

  Ensemble ens;
  std::uint64_t declared_runs = 0;
  try {
    const json header = json::parse(line);
    if (header.value("format", "") != "bellsim/ensemble") {
      throw ParseError("not a bellsim/ensemble file");
    }
    ens.model_id = header.at("model_id").get<std::string>();
    ens.settings_policy_id = header.at("settings_policy_id").get<std::string>();
    ens.master_seed = header.at("master_seed").get<std::uint64_t>();
    ens.policy = policy_from_json(header.at("policy"), ens.settings_policy_id);
    declared_runs = header.at("n_runs").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad ndjson header: ") + e.what());
  }

  ens.runs.reserve(declared_runs);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      RunRecord r;
      r.run_index = j.at("run").get<std::uint64_t>();
      r.setting_a = Direction(j.at("ax").get<double>(), j.at("ay").get<double>(),
                              j.at("az").get<double>());
      r.setting_b = Direction(j.at("bx").get<double>(), j.at("by").get<double>(),
                              j.at("bz").get<double>());
      r.outcome_a = Outcome(j.at("A").get<int>());
      r.outcome_b = Outcome(j.at("B").get<int>());
      r.lambda = HiddenState{state_from_json(j.at("lambda"))};
      r.mu_a = Microstate{state_from_json(j.at("mu_a")), Side::A};
      r.mu_b = Microstate{state_from_json(j.at("mu_b")), Side::B};
      ens.runs.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad ndjson record: ") + e.what());
    }
  }
  if (ens.runs.size() != declared_runs) {
    throw ParseError("ndjson header declares " + std::to_string(declared_runs) +
                     " runs but file contains " + std::to_string(ens.runs.size()));
  }
  return ens;
}

Ensemble ndjson_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_ndjson(is);
}

Ensemble read_ndjson_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_ndjson(in);
}

void atomic_write_file(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir =
      target.has_parent_path() ? target.parent_path() : fs::path(".");
  const fs::path tmp = dir / (target.filename().string() + ".tmp." +
                              std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open temporary file " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("rename to " + target.string() + " failed: " + ec.message());
  }
}

}  // namespace bellsim
