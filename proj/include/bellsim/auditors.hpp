#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellsim/binning.hpp"
#include "bellsim/ensemble.hpp"
#include "bellsim/exact_table.hpp"
#include "bellsim/model_spec.hpp"

namespace bellsim {

// The statistical conditions a model can be audited for. Writing lambda for
// the hidden state and mu_a/mu_b for the local microstates:
//
//  Factorizability        P(A,B|a,b,l) = P(A|a,l) * P(B|b,l)
//  SettingsIndependence   rho(l|a,b) = rho(l)
//  MicrostateIndependence P(mu_a|a,b,B) = P(mu_a|a) and mirrored for mu_b
//  ParameterIndependence  P(A|a,b,l) = P(A|a,l) and mirrored for B
//  OutcomeIndependence    P(A|B,a,b,l) = P(A|a,b,l) and mirrored for B
//  StructuralLocality     response procedures read only locally available data
//  InvertedOiPattern      P(A|B,a,b,l) = P(A|B,a,l)  (no b dependence)
//                         yet P(A|B,a,l) != P(A|a,l) (B dependence present)
enum class Condition {
  Factorizability,
  SettingsIndependence,
  MicrostateIndependence,
  ParameterIndependence,
  OutcomeIndependence,
  StructuralLocality,
  InvertedOiPattern,
};

enum class AuditMode { Exact, Empirical };

const char* condition_name(Condition c);

struct AuditVerdict {
  Condition condition = Condition::Factorizability;
  AuditMode mode = AuditMode::Exact;
  bool passed = false;
  // Set when too many conditioning cells lacked samples to test; `passed` is
  // not meaningful in that case.
  bool inconclusive = false;
  // Exact mode: max absolute deviation over conditioning cells.
  // Empirical mode: max total-variation (or probability) gap over cells.
  // InvertedOiPattern: the B-dependence gap (the part that must be nonzero).
  double divergence = 0.0;
  // Empirical mode only: Bonferroni-adjusted minimum p-value over cells.
  std::optional<double> p_value;
  // InvertedOiPattern only: the b-dependence gap (the part that must vanish).
  std::optional<double> secondary_divergence;
  std::string witness;  // where the extreme deviation sits
  std::size_t cells_tested = 0;
  std::size_t cells_skipped = 0;
};

struct AuditOptions {
  double tol = 1e-9;       // exact mode pass threshold
  double alpha = 1e-3;     // empirical mode significance level
  unsigned bins = 16;      // bins per dimension for continuous states
  std::size_t min_cell_count = 25;   // skip conditioning cells below this
  double max_skip_fraction = 0.2;    // more skipped than this => inconclusive
};

// ---- exact mode: marginalizations of a finite joint table ----

AuditVerdict audit_factorizability(const ExactJointTable& table, double tol = 1e-9);
AuditVerdict audit_settings_independence(const ExactJointTable& table,
                                         double tol = 1e-9);
AuditVerdict audit_microstate_independence(const ExactJointTable& table,
                                           double tol = 1e-9);
AuditVerdict audit_parameter_independence(const ExactJointTable& table,
                                          double tol = 1e-9);
AuditVerdict audit_outcome_independence(const ExactJointTable& table,
                                        double tol = 1e-9);
AuditVerdict audit_inverted_oi_pattern(const ExactJointTable& table,
                                       double tol = 1e-9);

std::vector<AuditVerdict> audit_all_exact(const ExactJointTable& table,
                                          double tol = 1e-9);

// ---- empirical mode: binned counts from a recorded ensemble ----

// Shared one-pass binning of an ensemble, reused across audits.
class BinnedEnsemble {
 public:
  BinnedEnsemble(const Ensemble& ensemble, const StateDomains& domains,
                 unsigned bins_per_dim);

  const SettingsPolicy& policy() const { return policy_; }
  std::size_t n_runs() const { return pair_.size(); }
  std::size_t n_pairs() const { return policy_.pairs.size(); }
  std::size_t n_lambda() const { return lam_binner_.n_cells(); }
  std::size_t n_mu_a() const { return mu_a_binner_.n_cells(); }
  std::size_t n_mu_b() const { return mu_b_binner_.n_cells(); }

  // per-run data
  const std::vector<std::uint32_t>& pair_idx() const { return pair_; }
  const std::vector<std::uint32_t>& lambda_cell() const { return lam_; }
  const std::vector<std::uint32_t>& mu_a_cell() const { return ma_; }
  const std::vector<std::uint32_t>& mu_b_cell() const { return mb_; }
  const std::vector<std::uint8_t>& outcome_a() const { return a_; }  // 0/1
  const std::vector<std::uint8_t>& outcome_b() const { return b_; }

  // settings groups: pairs sharing the same a (resp. b)
  const std::vector<std::size_t>& a_group_of_pair() const { return a_group_; }
  const std::vector<std::size_t>& b_group_of_pair() const { return b_group_; }
  std::size_t n_a_groups() const { return n_a_groups_; }
  std::size_t n_b_groups() const { return n_b_groups_; }

  std::string lambda_label(std::size_t cell) const { return lam_binner_.label(cell); }
  std::string mu_a_label(std::size_t cell) const { return mu_a_binner_.label(cell); }
  std::string mu_b_label(std::size_t cell) const { return mu_b_binner_.label(cell); }
  std::string pair_label(std::size_t pair) const;

 private:
  SettingsPolicy policy_;
  Binner lam_binner_;
  Binner mu_a_binner_;
  Binner mu_b_binner_;
  std::vector<std::uint32_t> pair_, lam_, ma_, mb_;
  std::vector<std::uint8_t> a_, b_;
  std::vector<std::size_t> a_group_, b_group_;
  std::size_t n_a_groups_ = 0, n_b_groups_ = 0;
};

AuditVerdict audit_factorizability(const BinnedEnsemble& data,
                                   const AuditOptions& opt = {});
AuditVerdict audit_settings_independence(const BinnedEnsemble& data,
                                         const AuditOptions& opt = {});
AuditVerdict audit_microstate_independence(const BinnedEnsemble& data,
                                           const AuditOptions& opt = {});
AuditVerdict audit_parameter_independence(const BinnedEnsemble& data,
                                          const AuditOptions& opt = {});
AuditVerdict audit_outcome_independence(const BinnedEnsemble& data,
                                        const AuditOptions& opt = {});
AuditVerdict audit_inverted_oi_pattern(const BinnedEnsemble& data,
                                       const AuditOptions& opt = {});

std::vector<AuditVerdict> audit_all_empirical(const BinnedEnsemble& data,
                                              const AuditOptions& opt = {});

// ---- structural locality ----

// Clause (i): the declared read sets of both responders are local.
// Clause (ii): probing, outcomes are invariant under remote-setting changes
// holding (lambda, mu, stream) fixed. Models with local responder signatures
// satisfy (ii) by construction; joint responders are probed against every
// alternative remote setting in the policy.
AuditVerdict audit_structural_locality(const ModelSpec& model,
                                       const SettingsPolicy& policy,
                                       std::size_t n_probes = 200,
                                       std::uint64_t probe_seed = 0xB5EED);

// ---- end-to-end chain over a family of models ----

struct TheoremChainRow {
  std::string model_id;
  bool factorizability = false;
  bool settings_independence = false;
  bool microstate_independence = false;
  double chsh = 0.0;
  bool chsh_bounded = false;  // <= 2 + tol
};

struct TheoremChainReport {
  std::vector<TheoremChainRow> factorizable_rows;
  double max_factorizable_chsh = 0.0;
  bool factorizable_all_pass = false;

  bool leak_structural_locality = false;
  bool leak_settings_independence = false;
  bool leak_microstate_independence = false;  // expected false
  double leak_chsh = 0.0;
  bool leak_saturates = false;  // |chsh - 2*sqrt(2)| <= tol

  double ablated_chsh = 0.0;
  bool ablated_microstate_independence = false;
  bool ablated_bounded = false;

  bool all_passed = false;
};

// Audits n_models random factorizable models (hidden-state cardinality drawn
// from 1..k_max) plus the microstate-leak model and its ablation, all under
// the canonical four-pair policy, and checks each row against the bound its
// audits imply.
TheoremChainReport audit_theorem_chain(std::size_t n_models, std::size_t k_max,
                                       std::uint64_t seed, double tol = 1e-12);

}  // namespace bellsim
