#include <cmath>
#include <sstream>

#include "bellsim/auditors.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/estimators.hpp"
#include "bellsim/models.hpp"

namespace bellsim {

namespace {

const char* read_name(RespondInput r) {
  switch (r) {
    case RespondInput::OwnSetting: return "own_setting";
    case RespondInput::RemoteSetting: return "remote_setting";
    case RespondInput::Lambda: return "lambda";
    case RespondInput::OwnMicrostate: return "own_microstate";
    case RespondInput::RemoteMicrostate: return "remote_microstate";
    case RespondInput::RemoteOutcome: return "remote_outcome";
    case RespondInput::OwnRng: return "own_rng";
    case RespondInput::SharedRng: return "shared_rng";
  }
  return "?";
}

std::string nonlocal_reads(const std::vector<RespondInput>& reads) {
  std::string out;
  for (auto r : reads) {
    if (LocalityDeclaration::reads_are_local({r})) continue;
    if (!out.empty()) out += ",";
    out += read_name(r);
  }
  return out;
}

}  // namespace

AuditVerdict audit_structural_locality(const ModelSpec& model,
                                       const SettingsPolicy& policy,
                                       std::size_t n_probes,
                                       std::uint64_t probe_seed) {
  policy.validate();
  AuditVerdict v;
  v.condition = Condition::StructuralLocality;
  v.mode = AuditMode::Exact;

  bool declared_local = model.locality.local() && !model.has_joint_responder();
  std::string declaration_witness;
  if (!declared_local) {
    std::string bad_a = nonlocal_reads(model.locality.respond_a_reads);
    std::string bad_b = nonlocal_reads(model.locality.respond_b_reads);
    declaration_witness = "declared nonlocal reads:";
    if (!bad_a.empty()) declaration_witness += " A<-{" + bad_a + "}";
    if (!bad_b.empty()) declaration_witness += " B<-{" + bad_b + "}";
    if (model.has_joint_responder()) declaration_witness += " (joint responder)";
  }

  auto distinct_a = policy.distinct_a();
  auto distinct_b = policy.distinct_b();
  std::size_t violations = 0;
  std::string probe_witness;

  for (std::size_t i = 0; i < n_probes; ++i) {
    RngStream pick = derive_rng_stream(probe_seed, i, Stage::Settings);
    std::size_t pr = pick.next_below(policy.size());
    const auto& [a, b] = policy.pairs[pr];

    RngStream lam_rng = derive_rng_stream(probe_seed, i, Stage::Lambda);
    HiddenState lambda = model.sample_lambda(a, b, lam_rng);
    RngStream mu_rng = derive_rng_stream(probe_seed, i, Stage::Microstates);
    auto [mu_a, mu_b] = model.sample_microstates(a, b, lambda, mu_rng);

    auto note_violation = [&](const std::string& what) {
      ++violations;
      if (probe_witness.empty()) {
        probe_witness = what + " (probe " + std::to_string(i) + ")";
      }
    };

    if (model.has_local_responders()) {
      // local signatures cannot see the remote side; probe that responses are
      // replayable functions of (setting, lambda, mu, stream)
      RngStream ra1 = derive_rng_stream(probe_seed, i, Stage::RespondA);
      RngStream ra2 = ra1;
      ++v.cells_tested;
      if (model.respond_a(a, lambda, mu_a, ra1).value() !=
          model.respond_a(a, lambda, mu_a, ra2).value()) {
        note_violation("A is not a function of its declared inputs");
      }
      RngStream rb1 = derive_rng_stream(probe_seed, i, Stage::RespondB);
      RngStream rb2 = rb1;
      ++v.cells_tested;
      if (model.respond_b(b, lambda, mu_b, rb1).value() !=
          model.respond_b(b, lambda, mu_b, rb2).value()) {
        note_violation("B is not a function of its declared inputs");
      }
    } else {
      // counterfactual probes: replay the identical stream with one remote
      // setting swapped and watch the local outcome
      RngStream base = derive_rng_stream(probe_seed, i, Stage::RespondA);
      RngStream r0 = base;
      auto [A0, B0] = model.respond_joint(a, b, lambda, mu_a, mu_b, r0);
      for (const auto& alt : distinct_b) {
        if (same_direction(alt, b)) continue;
        RngStream r1 = base;
        ++v.cells_tested;
        auto [A1, B1] = model.respond_joint(a, alt, lambda, mu_a, mu_b, r1);
        (void)B1;
        if (A1.value() != A0.value()) {
          note_violation("A shifted when only the remote setting changed");
        }
      }
      for (const auto& alt : distinct_a) {
        if (same_direction(alt, a)) continue;
        RngStream r1 = base;
        ++v.cells_tested;
        auto [A1, B1] = model.respond_joint(alt, b, lambda, mu_a, mu_b, r1);
        (void)A1;
        if (B1.value() != B0.value()) {
          note_violation("B shifted when only the remote setting changed");
        }
      }
    }
  }

  v.divergence = v.cells_tested == 0
                     ? 0.0
                     : static_cast<double>(violations) /
                           static_cast<double>(v.cells_tested);
  v.passed = declared_local && violations == 0;
  if (!declared_local) {
    v.witness = declaration_witness;
    if (!probe_witness.empty()) v.witness += "; " + probe_witness;
  } else {
    v.witness = probe_witness;
  }
  return v;
}

TheoremChainReport audit_theorem_chain(std::size_t n_models, std::size_t k_max,
                                       std::uint64_t seed, double tol) {
  if (n_models == 0 || k_max == 0) {
    throw InvalidArgument("theorem chain needs n_models > 0 and k_max > 0");
  }
  TheoremChainReport rep;
  SettingsPolicy policy = SettingsPolicy::paper();
  PaperDirections dirs = paper_directions();
  const double target = 2.0 * std::sqrt(2.0);

  RngStream krng = derive_rng_stream(seed, 0, Stage::Settings);
  rep.factorizable_all_pass = true;
  for (std::size_t i = 0; i < n_models; ++i) {
    std::size_t k = 1 + static_cast<std::size_t>(krng.next_below(k_max));
    ModelSpec model = models::build_random_factorizable_model(k, seed + 1 + i);
    auto table = model.exact_table(policy);
    if (!table) throw ModelFailure("factorizable model lost its exact table");

    TheoremChainRow row;
    row.model_id = model.id;
    row.factorizability = audit_factorizability(*table).passed;
    row.settings_independence = audit_settings_independence(*table).passed;
    row.microstate_independence = audit_microstate_independence(*table).passed;
    row.chsh = chsh_statistic(model, dirs).statistic;
    row.chsh_bounded = row.chsh <= 2.0 + tol;
    rep.max_factorizable_chsh = std::max(rep.max_factorizable_chsh, row.chsh);
    rep.factorizable_all_pass = rep.factorizable_all_pass &&
                                row.factorizability &&
                                row.settings_independence &&
                                row.microstate_independence && row.chsh_bounded;
    rep.factorizable_rows.push_back(std::move(row));
  }

  {
    ModelSpec leak = models::build_microstate_leak_model();
    auto table = leak.exact_table(policy);
    if (!table) throw ModelFailure("leak model lost its exact table");
    rep.leak_structural_locality =
        audit_structural_locality(leak, policy).passed;
    rep.leak_settings_independence = audit_settings_independence(*table).passed;
    rep.leak_microstate_independence =
        audit_microstate_independence(*table).passed;
    rep.leak_chsh = chsh_statistic(leak, dirs).statistic;
    rep.leak_saturates = std::abs(rep.leak_chsh - target) <= tol;
  }

  {
    ModelSpec ablated = models::build_microstate_leak_ablated(policy);
    auto table = ablated.exact_table(policy);
    if (!table) throw ModelFailure("ablated model lost its exact table");
    rep.ablated_microstate_independence =
        audit_microstate_independence(*table).passed;
    rep.ablated_chsh = chsh_statistic(ablated, dirs).statistic;
    rep.ablated_bounded = rep.ablated_chsh <= 2.0 + tol;
  }

  rep.all_passed = rep.factorizable_all_pass && rep.leak_structural_locality &&
                   rep.leak_settings_independence &&
                   !rep.leak_microstate_independence && rep.leak_saturates &&
                   rep.ablated_microstate_independence && rep.ablated_bounded;
  return rep;
}

}  // namespace bellsim
