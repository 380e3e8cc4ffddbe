#include <string>
#include <vector>

#include "bellsim/errors.hpp"
#include "bellsim/game.hpp"
#include "bellsim/models.hpp"

namespace bellsim::models {

namespace {

bool has_prefix(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(ctx + ": cannot parse number '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(ctx + ": cannot parse integer '" + s + "'");
  }
}

}  // namespace

ModelSpec build_from_id(const std::string& model_id) {
  if (model_id == "singlet") return build_singlet_oracle();
  if (model_id == "sign") return build_sign_model();
  if (model_id == "leak") return build_microstate_leak_model();
  if (model_id == "resultleak") return build_result_leak_demo_model();
  if (has_prefix(model_id, "dice:")) {
    std::vector<double> weights;
    for (const auto& tok : split(model_id.substr(5), ',')) {
      weights.push_back(parse_double(tok, model_id));
    }
    return build_weighted_dice_model(weights);
  }
  if (has_prefix(model_id, "randfac:")) {
    const auto parts = split(model_id, ':');
    if (parts.size() != 3) {
      throw InvalidArgument("expected randfac:<k>:<seed>, got '" + model_id + "'");
    }
    const std::uint64_t k = parse_u64(parts[1], model_id);
    const std::uint64_t seed = parse_u64(parts[2], model_id);
    return build_random_factorizable_model(static_cast<std::size_t>(k), seed);
  }
  // Transcript headers name their generator "game:<strategy>:<leak>"; resolve
  // those to replay models so recorded games audit like any other ensemble.
  if (has_prefix(model_id, "game:")) {
    return game_replay_model(model_id);
  }
  throw InvalidArgument(
      "unknown model id '" + model_id +
      "' (expected singlet | sign | leak | resultleak | dice:w1,w2 | "
      "randfac:k:seed)");
}

ModelDescriptor descriptor_for(const std::string& model_id) {
  ModelDescriptor d;
  d.model_id = model_id;
  if (model_id == "singlet") {
    d.settings_independence = true;
    d.microstate_independence = true;
    d.has_exact_e = true;
    return d;
  }
  if (model_id == "sign") {
    d.local_causality = true;
    d.settings_independence = true;
    d.microstate_independence = true;
    d.factorizability = true;
    d.deterministic = true;
    d.has_exact_e = true;
    return d;
  }
  if (model_id == "leak" || model_id == "resultleak") {
    d.local_causality = true;
    d.settings_independence = true;
    d.deterministic = true;
    d.has_exact_e = true;
    return d;
  }
  if (has_prefix(model_id, "dice:")) {
    d.local_causality = true;
    d.settings_independence = true;
    d.microstate_independence = true;
    d.factorizability = true;
    d.deterministic = true;
    d.has_exact_e = true;
    return d;
  }
  if (has_prefix(model_id, "randfac:")) {
    d.local_causality = true;
    d.settings_independence = true;
    d.microstate_independence = true;
    d.factorizability = true;
    d.has_exact_e = true;
    return d;
  }
  if (has_prefix(model_id, "game:")) {
    game_replay_model(model_id);  // validates strategy and channel names
    const bool leak_open =
        model_id.size() >= 16 &&
        model_id.compare(model_id.size() - 16, 16, ":remote-question") == 0;
    d.local_causality = true;
    d.settings_independence = true;
    d.microstate_independence = !leak_open;
    // sign never reads the channel, so its outcomes factorize even when the
    // leaked question sits unused in mu_a.
    d.factorizability = has_prefix(model_id, "game:sign:") || !leak_open;
    d.deterministic = true;
    return d;
  }
  throw InvalidArgument("unknown model id '" + model_id + "'");
}

SettingsPolicy default_policy_for(const std::string& model_id) {
  if (has_prefix(model_id, "dice:")) return dice_policy();
  if (has_prefix(model_id, "game:")) return game_policy();
  return SettingsPolicy::paper();
}

std::vector<ModelDescriptor> zoo() {
  return {descriptor_for("singlet"),      descriptor_for("sign"),
          descriptor_for("leak"),         descriptor_for("dice:0.9,0.2"),
          descriptor_for("randfac:4:1"),  descriptor_for("resultleak")};
}

}  // namespace bellsim::models
