#include <algorithm>
#include <cmath>
#include <sstream>

#include "bellsim/auditors.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/stats.hpp"

namespace bellsim {

namespace {

std::string fmt_dir(const Direction& d) {
  std::ostringstream out;
  out.precision(3);
  out << "(" << d.x() << "," << d.y() << "," << d.z() << ")";
  return out.str();
}

AuditVerdict base_verdict(Condition c) {
  AuditVerdict v;
  v.condition = c;
  v.mode = AuditMode::Empirical;
  v.passed = true;
  v.p_value = 1.0;
  return v;
}

struct PSummary {
  double min_p = 1.0;
  std::size_t n_tests = 0;

  void add(double p) {
    min_p = std::min(min_p, p);
    ++n_tests;
  }
  double adjusted() const {
    if (n_tests == 0) return 1.0;
    return std::min(1.0, static_cast<double>(n_tests) * min_p);
  }
};

void finish(AuditVerdict& v, const PSummary& ps, double alpha) {
  v.p_value = ps.adjusted();
  v.passed = *v.p_value >= alpha;
}

void apply_skip_rule(AuditVerdict& v, double max_skip_fraction) {
  std::size_t total = v.cells_tested + v.cells_skipped;
  v.inconclusive =
      total > 0 && static_cast<double>(v.cells_skipped) >
                       max_skip_fraction * static_cast<double>(total);
}

void track_max(AuditVerdict& v, double gap, const std::string& where) {
  if (gap > v.divergence) {
    v.divergence = gap;
    v.witness = where;
  }
}

}  // namespace

BinnedEnsemble::BinnedEnsemble(const Ensemble& ensemble,
                               const StateDomains& domains,
                               unsigned bins_per_dim)
    : policy_(ensemble.policy),
      lam_binner_(domains.lambda, bins_per_dim),
      mu_a_binner_(domains.mu_a, bins_per_dim),
      mu_b_binner_(domains.mu_b, bins_per_dim) {
  policy_.validate();
  std::size_t n = ensemble.runs.size();
  pair_.reserve(n);
  lam_.reserve(n);
  ma_.reserve(n);
  mb_.reserve(n);
  a_.reserve(n);
  b_.reserve(n);
  for (const auto& run : ensemble.runs) {
    std::size_t pr = policy_.find_pair(run.setting_a, run.setting_b);
    if (pr == SettingsPolicy::npos) {
      throw UndiscretizableState("run settings do not appear in the policy");
    }
    pair_.push_back(static_cast<std::uint32_t>(pr));
    lam_.push_back(static_cast<std::uint32_t>(lam_binner_.cell_of(run.lambda.payload)));
    ma_.push_back(static_cast<std::uint32_t>(mu_a_binner_.cell_of(run.mu_a.payload)));
    mb_.push_back(static_cast<std::uint32_t>(mu_b_binner_.cell_of(run.mu_b.payload)));
    a_.push_back(static_cast<std::uint8_t>(run.outcome_a.index()));
    b_.push_back(static_cast<std::uint8_t>(run.outcome_b.index()));
  }

  auto das = policy_.distinct_a();
  auto dbs = policy_.distinct_b();
  n_a_groups_ = das.size();
  n_b_groups_ = dbs.size();
  a_group_.resize(policy_.pairs.size());
  b_group_.resize(policy_.pairs.size());
  for (std::size_t pr = 0; pr < policy_.pairs.size(); ++pr) {
    for (std::size_t g = 0; g < das.size(); ++g) {
      if (same_direction(policy_.pairs[pr].first, das[g])) a_group_[pr] = g;
    }
    for (std::size_t g = 0; g < dbs.size(); ++g) {
      if (same_direction(policy_.pairs[pr].second, dbs[g])) b_group_[pr] = g;
    }
  }
}

std::string BinnedEnsemble::pair_label(std::size_t pair) const {
  return "a=" + fmt_dir(policy_.pairs[pair].first) +
         ",b=" + fmt_dir(policy_.pairs[pair].second);
}

AuditVerdict audit_settings_independence(const BinnedEnsemble& d,
                                         const AuditOptions& opt) {
  AuditVerdict v = base_verdict(Condition::SettingsIndependence);
  std::size_t P = d.n_pairs(), L = d.n_lambda();
  std::vector<std::uint64_t> counts(P * L, 0);
  for (std::size_t i = 0; i < d.n_runs(); ++i) {
    ++counts[d.pair_idx()[i] * L + d.lambda_cell()[i]];
  }

  std::vector<std::vector<std::uint64_t>> kept;
  std::vector<std::size_t> kept_pairs;
  std::vector<std::uint64_t> pooled(L, 0);
  for (std::size_t pr = 0; pr < P; ++pr) {
    std::uint64_t total = 0;
    for (std::size_t l = 0; l < L; ++l) total += counts[pr * L + l];
    if (total < opt.min_cell_count) {
      ++v.cells_skipped;
      continue;
    }
    ++v.cells_tested;
    kept.emplace_back(counts.begin() + pr * L, counts.begin() + (pr + 1) * L);
    kept_pairs.push_back(pr);
    for (std::size_t l = 0; l < L; ++l) pooled[l] += counts[pr * L + l];
  }

  PSummary ps;
  if (kept.size() >= 2) {
    ps.add(chi2_contingency(kept).p_value);
    for (std::size_t k = 0; k < kept.size(); ++k) {
      track_max(v, total_variation(kept[k], pooled),
                "rho(lambda) shifts with settings: " + d.pair_label(kept_pairs[k]));
    }
  }
  finish(v, ps, opt.alpha);
  apply_skip_rule(v, opt.max_skip_fraction);
  return v;
}

namespace {

// One side of the microstate audit: homogeneity of the mu distribution across
// (remote setting, remote outcome) rows, within each own-setting group.
void microstate_side(AuditVerdict& v, PSummary& ps, const BinnedEnsemble& d,
                     const AuditOptions& opt, bool side_a) {
  std::size_t P = d.n_pairs();
  std::size_t M = side_a ? d.n_mu_a() : d.n_mu_b();
  const auto& mu = side_a ? d.mu_a_cell() : d.mu_b_cell();
  const auto& remote_outcome = side_a ? d.outcome_b() : d.outcome_a();
  const auto& groups = side_a ? d.a_group_of_pair() : d.b_group_of_pair();
  std::size_t n_groups = side_a ? d.n_a_groups() : d.n_b_groups();

  // counts[(pair, remote outcome)][mu cell]
  std::vector<std::uint64_t> counts(P * 2 * M, 0);
  for (std::size_t i = 0; i < d.n_runs(); ++i) {
    ++counts[(d.pair_idx()[i] * 2 + remote_outcome[i]) * M + mu[i]];
  }

  for (std::size_t g = 0; g < n_groups; ++g) {
    std::vector<std::vector<std::uint64_t>> kept;
    std::vector<std::string> row_labels;
    std::vector<std::uint64_t> pooled(M, 0);
    // per-pair rows pooled over the remote outcome, for the setting clause
    std::vector<std::vector<std::uint64_t>> setting_rows;
    for (std::size_t pr = 0; pr < P; ++pr) {
      if (groups[pr] != g) continue;
      std::vector<std::uint64_t> srow(M, 0);
      for (int o = 0; o < 2; ++o) {
        std::vector<std::uint64_t> row(counts.begin() + (pr * 2 + o) * M,
                                       counts.begin() + (pr * 2 + o + 1) * M);
        std::uint64_t total = 0;
        for (std::size_t m = 0; m < M; ++m) {
          total += row[m];
          srow[m] += row[m];
          pooled[m] += row[m];
        }
        if (total < opt.min_cell_count) {
          ++v.cells_skipped;
          continue;
        }
        ++v.cells_tested;
        row_labels.push_back(d.pair_label(pr) + (side_a ? " B=" : " A=") +
                             (o ? "+1" : "-1"));
        kept.push_back(std::move(row));
      }
      setting_rows.push_back(std::move(srow));
    }
    if (kept.size() >= 2) {
      ps.add(chi2_contingency(kept).p_value);
      // clause attribution: how much of the shift is explained by the remote
      // setting alone
      double setting_tv = 0.0;
      for (const auto& srow : setting_rows) {
        setting_tv = std::max(setting_tv, total_variation(srow, pooled));
      }
      for (std::size_t k = 0; k < kept.size(); ++k) {
        double tv = total_variation(kept[k], pooled);
        std::ostringstream where;
        where << "P(mu_" << (side_a ? "a" : "b")
              << ") shifts with remote data: " << row_labels[k]
              << " [remote-setting clause max TV=" << setting_tv << "]";
        track_max(v, tv, where.str());
      }
    }
  }
}

}  // namespace

AuditVerdict audit_microstate_independence(const BinnedEnsemble& d,
                                           const AuditOptions& opt) {
  AuditVerdict v = base_verdict(Condition::MicrostateIndependence);
  PSummary ps;
  microstate_side(v, ps, d, opt, true);
  microstate_side(v, ps, d, opt, false);
  finish(v, ps, opt.alpha);
  apply_skip_rule(v, opt.max_skip_fraction);
  return v;
}

AuditVerdict audit_factorizability(const BinnedEnsemble& d,
                                   const AuditOptions& opt) {
  AuditVerdict v = base_verdict(Condition::Factorizability);
  std::size_t P = d.n_pairs(), L = d.n_lambda();

  // joint (A,B) counts per (pair, lambda) plus pooled per-side marginals
  std::vector<std::uint64_t> joint(P * L * 4, 0);
  std::vector<std::uint64_t> margA(d.n_a_groups() * L * 2, 0);
  std::vector<std::uint64_t> margB(d.n_b_groups() * L * 2, 0);
  for (std::size_t i = 0; i < d.n_runs(); ++i) {
    std::size_t pr = d.pair_idx()[i], l = d.lambda_cell()[i];
    int ai = d.outcome_a()[i], bi = d.outcome_b()[i];
    ++joint[(pr * L + l) * 4 + ai * 2 + bi];
    ++margA[(d.a_group_of_pair()[pr] * L + l) * 2 + ai];
    ++margB[(d.b_group_of_pair()[pr] * L + l) * 2 + bi];
  }

  PSummary ps;
  for (std::size_t pr = 0; pr < P; ++pr) {
    std::size_t ga = d.a_group_of_pair()[pr], gb = d.b_group_of_pair()[pr];
    for (std::size_t l = 0; l < L; ++l) {
      std::vector<std::uint64_t> obs(joint.begin() + (pr * L + l) * 4,
                                     joint.begin() + (pr * L + l) * 4 + 4);
      std::uint64_t n_cell = obs[0] + obs[1] + obs[2] + obs[3];
      if (n_cell == 0) continue;
      if (n_cell < opt.min_cell_count) {
        ++v.cells_skipped;
        continue;
      }
      ++v.cells_tested;

      double totA = static_cast<double>(margA[(ga * L + l) * 2 + 0] +
                                        margA[(ga * L + l) * 2 + 1]);
      double totB = static_cast<double>(margB[(gb * L + l) * 2 + 0] +
                                        margB[(gb * L + l) * 2 + 1]);
      std::vector<double> probs(4, 0.0);
      for (int ai = 0; ai < 2; ++ai) {
        for (int bi = 0; bi < 2; ++bi) {
          double pa = static_cast<double>(margA[(ga * L + l) * 2 + ai]) / totA;
          double pb = static_cast<double>(margB[(gb * L + l) * 2 + bi]) / totB;
          probs[ai * 2 + bi] = pa * pb;
          double gap = std::abs(static_cast<double>(obs[ai * 2 + bi]) /
                                    static_cast<double>(n_cell) -
                                probs[ai * 2 + bi]);
          track_max(v, gap,
                    d.pair_label(pr) + " lambda=" + d.lambda_label(l) +
                        " A=" + (ai ? "+1" : "-1") + " B=" + (bi ? "+1" : "-1"));
        }
      }
      ps.add(chi2_goodness_of_fit(obs, probs, 3).p_value);
    }
  }
  finish(v, ps, opt.alpha);
  apply_skip_rule(v, opt.max_skip_fraction);
  return v;
}

AuditVerdict audit_parameter_independence(const BinnedEnsemble& d,
                                          const AuditOptions& opt) {
  AuditVerdict v = base_verdict(Condition::ParameterIndependence);
  std::size_t P = d.n_pairs(), L = d.n_lambda();
  std::vector<std::uint64_t> countsA(P * L * 2, 0);
  std::vector<std::uint64_t> countsB(P * L * 2, 0);
  for (std::size_t i = 0; i < d.n_runs(); ++i) {
    std::size_t pr = d.pair_idx()[i], l = d.lambda_cell()[i];
    ++countsA[(pr * L + l) * 2 + d.outcome_a()[i]];
    ++countsB[(pr * L + l) * 2 + d.outcome_b()[i]];
  }

  PSummary ps;
  auto one_side = [&](bool side_a) {
    const auto& counts = side_a ? countsA : countsB;
    const auto& groups = side_a ? d.a_group_of_pair() : d.b_group_of_pair();
    std::size_t n_groups = side_a ? d.n_a_groups() : d.n_b_groups();
    for (std::size_t g = 0; g < n_groups; ++g) {
      for (std::size_t l = 0; l < L; ++l) {
        std::vector<std::vector<std::uint64_t>> rows;
        std::vector<std::size_t> row_pairs;
        std::uint64_t total = 0;
        for (std::size_t pr = 0; pr < P; ++pr) {
          if (groups[pr] != g) continue;
          std::vector<std::uint64_t> row = {counts[(pr * L + l) * 2 + 0],
                                            counts[(pr * L + l) * 2 + 1]};
          total += row[0] + row[1];
          rows.push_back(std::move(row));
          row_pairs.push_back(pr);
        }
        if (total == 0) continue;
        if (total < opt.min_cell_count) {
          ++v.cells_skipped;
          continue;
        }
        ++v.cells_tested;
        ps.add(chi2_contingency(rows).p_value);
        double pooled1 = 0.0, pooled_tot = 0.0;
        for (const auto& row : rows) {
          pooled1 += static_cast<double>(row[1]);
          pooled_tot += static_cast<double>(row[0] + row[1]);
        }
        double pooled = pooled1 / pooled_tot;
        for (std::size_t k = 0; k < rows.size(); ++k) {
          double rt = static_cast<double>(rows[k][0] + rows[k][1]);
          if (rt == 0.0) continue;
          double gap = std::abs(static_cast<double>(rows[k][1]) / rt - pooled);
          track_max(v, gap,
                    std::string("P(") + (side_a ? "A" : "B") +
                        ") shifts with remote setting: " +
                        d.pair_label(row_pairs[k]) + " lambda=" + d.lambda_label(l));
        }
      }
    }
  };
  one_side(true);
  one_side(false);
  finish(v, ps, opt.alpha);
  apply_skip_rule(v, opt.max_skip_fraction);
  return v;
}

AuditVerdict audit_outcome_independence(const BinnedEnsemble& d,
                                        const AuditOptions& opt) {
  AuditVerdict v = base_verdict(Condition::OutcomeIndependence);
  std::size_t P = d.n_pairs(), L = d.n_lambda();
  std::vector<std::uint64_t> joint(P * L * 4, 0);
  for (std::size_t i = 0; i < d.n_runs(); ++i) {
    ++joint[(d.pair_idx()[i] * L + d.lambda_cell()[i]) * 4 +
            d.outcome_a()[i] * 2 + d.outcome_b()[i]];
  }

  PSummary ps;
  for (std::size_t pr = 0; pr < P; ++pr) {
    for (std::size_t l = 0; l < L; ++l) {
      const std::uint64_t* cell = &joint[(pr * L + l) * 4];
      std::uint64_t n_cell = cell[0] + cell[1] + cell[2] + cell[3];
      if (n_cell == 0) continue;
      if (n_cell < opt.min_cell_count) {
        ++v.cells_skipped;
        continue;
      }
      ++v.cells_tested;
      std::vector<std::vector<std::uint64_t>> table = {{cell[0], cell[1]},
                                                       {cell[2], cell[3]}};
      ps.add(chi2_contingency(table).p_value);
      double n = static_cast<double>(n_cell);
      for (int ai = 0; ai < 2; ++ai) {
        for (int bi = 0; bi < 2; ++bi) {
          double pj = static_cast<double>(cell[ai * 2 + bi]) / n;
          double pa = static_cast<double>(cell[ai * 2] + cell[ai * 2 + 1]) / n;
          double pb = static_cast<double>(cell[bi] + cell[2 + bi]) / n;
          track_max(v, std::abs(pj - pa * pb),
                    d.pair_label(pr) + " lambda=" + d.lambda_label(l) +
                        " A=" + (ai ? "+1" : "-1") + " B=" + (bi ? "+1" : "-1"));
        }
      }
    }
  }
  finish(v, ps, opt.alpha);
  apply_skip_rule(v, opt.max_skip_fraction);
  return v;
}

AuditVerdict audit_inverted_oi_pattern(const BinnedEnsemble& d,
                                       const AuditOptions& opt) {
  AuditVerdict v = base_verdict(Condition::InvertedOiPattern);
  std::size_t P = d.n_pairs(), L = d.n_lambda();
  // counts[(pair, lambda, B)][A]
  std::vector<std::uint64_t> counts(P * L * 2 * 2, 0);
  for (std::size_t i = 0; i < d.n_runs(); ++i) {
    ++counts[((d.pair_idx()[i] * L + d.lambda_cell()[i]) * 2 +
              d.outcome_b()[i]) *
                 2 +
             d.outcome_a()[i]];
  }

  PSummary ps_eq, ps_ineq;
  double eq_div = 0.0, ineq_div = 0.0;
  std::string eq_witness, ineq_witness;

  for (std::size_t g = 0; g < d.n_a_groups(); ++g) {
    for (std::size_t l = 0; l < L; ++l) {
      // equality clause: P(A | B, a, b, l) homogeneous across b
      for (int bi = 0; bi < 2; ++bi) {
        std::vector<std::vector<std::uint64_t>> rows;
        std::uint64_t total = 0;
        for (std::size_t pr = 0; pr < P; ++pr) {
          if (d.a_group_of_pair()[pr] != g) continue;
          std::vector<std::uint64_t> row = {
              counts[((pr * L + l) * 2 + bi) * 2 + 0],
              counts[((pr * L + l) * 2 + bi) * 2 + 1]};
          total += row[0] + row[1];
          rows.push_back(std::move(row));
        }
        if (total == 0) continue;
        if (total < opt.min_cell_count) {
          ++v.cells_skipped;
          continue;
        }
        ++v.cells_tested;
        ps_eq.add(chi2_contingency(rows).p_value);
        double pooled1 = 0.0, pooled_tot = 0.0;
        for (const auto& row : rows) {
          pooled1 += static_cast<double>(row[1]);
          pooled_tot += static_cast<double>(row[0] + row[1]);
        }
        for (const auto& row : rows) {
          double rt = static_cast<double>(row[0] + row[1]);
          if (rt == 0.0) continue;
          double gap = std::abs(static_cast<double>(row[1]) / rt -
                                pooled1 / pooled_tot);
          if (gap > eq_div) {
            eq_div = gap;
            eq_witness = "P(A|B) varies with remote setting: a-group " +
                         std::to_string(g) + " lambda=" + d.lambda_label(l) +
                         " B=" + (bi ? "+1" : "-1");
          }
        }
      }

      // inequality clause: A depends on B within the pooled group
      std::vector<std::vector<std::uint64_t>> dep(2,
                                                  std::vector<std::uint64_t>(2, 0));
      std::uint64_t total = 0;
      for (std::size_t pr = 0; pr < P; ++pr) {
        if (d.a_group_of_pair()[pr] != g) continue;
        for (int bi = 0; bi < 2; ++bi) {
          for (int ai = 0; ai < 2; ++ai) {
            dep[bi][ai] += counts[((pr * L + l) * 2 + bi) * 2 + ai];
          }
        }
      }
      total = dep[0][0] + dep[0][1] + dep[1][0] + dep[1][1];
      if (total == 0) continue;
      if (total < opt.min_cell_count) {
        ++v.cells_skipped;
        continue;
      }
      ++v.cells_tested;
      ps_ineq.add(chi2_contingency(dep).p_value);
      double marg1 = static_cast<double>(dep[0][1] + dep[1][1]) /
                     static_cast<double>(total);
      for (int bi = 0; bi < 2; ++bi) {
        double rt = static_cast<double>(dep[bi][0] + dep[bi][1]);
        if (rt == 0.0) continue;
        double gap = std::abs(static_cast<double>(dep[bi][1]) / rt - marg1);
        if (gap > ineq_div) {
          ineq_div = gap;
          ineq_witness = "P(A|B) differs from P(A): a-group " +
                         std::to_string(g) + " lambda=" + d.lambda_label(l) +
                         " B=" + (bi ? "+1" : "-1");
        }
      }
    }
  }

  double p_eq = ps_eq.adjusted();
  double p_ineq = ps_ineq.adjusted();
  v.divergence = ineq_div;
  v.secondary_divergence = eq_div;
  v.p_value = p_ineq;
  v.passed = p_eq >= opt.alpha && p_ineq < opt.alpha;
  {
    std::ostringstream w;
    if (p_eq < opt.alpha) {
      w << eq_witness << " [equality-clause p=" << p_eq << "]";
    } else if (v.passed) {
      w << ineq_witness << " [equality-clause p=" << p_eq << "]";
    } else {
      w << "no remote-outcome dependence found [equality-clause p=" << p_eq
        << "]";
    }
    v.witness = w.str();
  }
  apply_skip_rule(v, opt.max_skip_fraction);
  return v;
}

std::vector<AuditVerdict> audit_all_empirical(const BinnedEnsemble& d,
                                              const AuditOptions& opt) {
  return {
      audit_factorizability(d, opt),
      audit_settings_independence(d, opt),
      audit_microstate_independence(d, opt),
      audit_parameter_independence(d, opt),
      audit_outcome_independence(d, opt),
      audit_inverted_oi_pattern(d, opt),
  };
}

}  // namespace bellsim
