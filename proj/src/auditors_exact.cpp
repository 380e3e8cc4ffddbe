#include <algorithm>
#include <cmath>
#include <sstream>

#include "bellsim/auditors.hpp"
#include "bellsim/errors.hpp"

namespace bellsim {

const char* condition_name(Condition c) {
  switch (c) {
    case Condition::Factorizability: return "factorizability";
    case Condition::SettingsIndependence: return "settings_independence";
    case Condition::MicrostateIndependence: return "microstate_independence";
    case Condition::ParameterIndependence: return "parameter_independence";
    case Condition::OutcomeIndependence: return "outcome_independence";
    case Condition::StructuralLocality: return "structural_locality";
    case Condition::InvertedOiPattern: return "inverted_oi_pattern";
  }
  return "unknown";
}

namespace {

constexpr double kMassEps = 1e-15;

std::string fmt_dir(const Direction& d) {
  std::ostringstream out;
  out.precision(3);
  out << "(" << d.x() << "," << d.y() << "," << d.z() << ")";
  return out.str();
}

std::string pair_label(const SettingsPolicy& policy, std::size_t pair) {
  return "a=" + fmt_dir(policy.pairs[pair].first) +
         ",b=" + fmt_dir(policy.pairs[pair].second);
}

// Marginals of an ExactJointTable, with settings grouped by shared a / b.
struct Marginals {
  const ExactJointTable& t;
  std::size_t n_pairs, L, MA, MB;
  std::vector<double> w;

  std::vector<double> massL;    // [pair][l]
  std::vector<double> jointAB;  // [pair][l][ai][bi]
  std::vector<double> muA;      // [pair][ma]
  std::vector<double> muA_B;    // [pair][ma][bi]  (mu_a with remote outcome)
  std::vector<double> muB;      // [pair][mb]
  std::vector<double> muB_A;    // [pair][mb][ai]

  std::vector<std::size_t> a_group, b_group;  // per pair
  std::size_t n_a_groups = 0, n_b_groups = 0;

  explicit Marginals(const ExactJointTable& table)
      : t(table),
        n_pairs(table.policy.pairs.size()),
        L(table.n_lambda),
        MA(table.n_mu_a),
        MB(table.n_mu_b),
        w(table.policy.weights) {
    massL.assign(n_pairs * L, 0.0);
    jointAB.assign(n_pairs * L * 4, 0.0);
    muA.assign(n_pairs * MA, 0.0);
    muA_B.assign(n_pairs * MA * 2, 0.0);
    muB.assign(n_pairs * MB, 0.0);
    muB_A.assign(n_pairs * MB * 2, 0.0);
    for (std::size_t pr = 0; pr < n_pairs; ++pr) {
      for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t ma = 0; ma < MA; ++ma) {
          for (std::size_t mb = 0; mb < MB; ++mb) {
            for (int ai = 0; ai < 2; ++ai) {
              for (int bi = 0; bi < 2; ++bi) {
                double v = t.at(pr, l, ma, mb, ai, bi);
                if (v == 0.0) continue;
                massL[pr * L + l] += v;
                jointAB[((pr * L + l) * 2 + ai) * 2 + bi] += v;
                muA[pr * MA + ma] += v;
                muA_B[(pr * MA + ma) * 2 + bi] += v;
                muB[pr * MB + mb] += v;
                muB_A[(pr * MB + mb) * 2 + ai] += v;
              }
            }
          }
        }
      }
    }
    auto das = t.policy.distinct_a();
    auto dbs = t.policy.distinct_b();
    n_a_groups = das.size();
    n_b_groups = dbs.size();
    a_group.resize(n_pairs);
    b_group.resize(n_pairs);
    for (std::size_t pr = 0; pr < n_pairs; ++pr) {
      for (std::size_t g = 0; g < das.size(); ++g) {
        if (same_direction(t.policy.pairs[pr].first, das[g])) a_group[pr] = g;
      }
      for (std::size_t g = 0; g < dbs.size(); ++g) {
        if (same_direction(t.policy.pairs[pr].second, dbs[g])) b_group[pr] = g;
      }
    }
  }

  double mass(std::size_t pr, std::size_t l) const { return massL[pr * L + l]; }
  double jab(std::size_t pr, std::size_t l, int ai, int bi) const {
    return jointAB[((pr * L + l) * 2 + ai) * 2 + bi];
  }
  // P(A=ai | pair, l), the mu-marginalized response distribution
  double pA(std::size_t pr, std::size_t l, int ai) const {
    return (jab(pr, l, ai, 0) + jab(pr, l, ai, 1)) / mass(pr, l);
  }
  double pB(std::size_t pr, std::size_t l, int bi) const {
    return (jab(pr, l, 0, bi) + jab(pr, l, 1, bi)) / mass(pr, l);
  }

  // pooled P(A=ai | a-group g, l) and the pooled cell mass
  std::pair<double, double> pooledA(std::size_t g, std::size_t l, int ai) const {
    double num = 0.0, den = 0.0;
    for (std::size_t pr = 0; pr < n_pairs; ++pr) {
      if (a_group[pr] != g) continue;
      num += w[pr] * (jab(pr, l, ai, 0) + jab(pr, l, ai, 1));
      den += w[pr] * mass(pr, l);
    }
    return {den > kMassEps ? num / den : 0.0, den};
  }
  std::pair<double, double> pooledB(std::size_t g, std::size_t l, int bi) const {
    double num = 0.0, den = 0.0;
    for (std::size_t pr = 0; pr < n_pairs; ++pr) {
      if (b_group[pr] != g) continue;
      num += w[pr] * (jab(pr, l, 0, bi) + jab(pr, l, 1, bi));
      den += w[pr] * mass(pr, l);
    }
    return {den > kMassEps ? num / den : 0.0, den};
  }
};

AuditVerdict base_verdict(Condition c) {
  AuditVerdict v;
  v.condition = c;
  v.mode = AuditMode::Exact;
  v.passed = true;
  return v;
}

void track_max(AuditVerdict& v, double gap, const std::string& where) {
  if (gap > v.divergence) {
    v.divergence = gap;
    v.witness = where;
  }
}

}  // namespace

AuditVerdict audit_factorizability(const ExactJointTable& table, double tol) {
  Marginals m(table);
  AuditVerdict v = base_verdict(Condition::Factorizability);
  for (std::size_t pr = 0; pr < m.n_pairs; ++pr) {
    for (std::size_t l = 0; l < m.L; ++l) {
      if (m.mass(pr, l) <= kMassEps) continue;
      ++v.cells_tested;
      for (int ai = 0; ai < 2; ++ai) {
        for (int bi = 0; bi < 2; ++bi) {
          double joint = m.jab(pr, l, ai, bi) / m.mass(pr, l);
          double pa = m.pooledA(m.a_group[pr], l, ai).first;
          double pb = m.pooledB(m.b_group[pr], l, bi).first;
          track_max(v, std::abs(joint - pa * pb),
                    pair_label(table.policy, pr) + " lambda=" +
                        table.lambda_label(l) + " A=" + (ai ? "+1" : "-1") +
                        " B=" + (bi ? "+1" : "-1"));
        }
      }
    }
  }
  v.passed = v.divergence <= tol;
  return v;
}

AuditVerdict audit_settings_independence(const ExactJointTable& table, double tol) {
  Marginals m(table);
  AuditVerdict v = base_verdict(Condition::SettingsIndependence);
  std::vector<double> pooled(m.L, 0.0);
  for (std::size_t pr = 0; pr < m.n_pairs; ++pr) {
    for (std::size_t l = 0; l < m.L; ++l) pooled[l] += m.w[pr] * m.mass(pr, l);
  }
  for (std::size_t pr = 0; pr < m.n_pairs; ++pr) {
    ++v.cells_tested;
    double tv = 0.0;
    for (std::size_t l = 0; l < m.L; ++l) {
      tv += std::abs(m.mass(pr, l) - pooled[l]);
    }
    track_max(v, 0.5 * tv, pair_label(table.policy, pr));
  }
  v.passed = v.divergence <= tol;
  return v;
}

AuditVerdict audit_microstate_independence(const ExactJointTable& table,
                                           double tol) {
  Marginals m(table);
  AuditVerdict v = base_verdict(Condition::MicrostateIndependence);

  // side A: distribution over mu_a cells, conditioned within each a-group
  for (std::size_t g = 0; g < m.n_a_groups; ++g) {
    // group reference: P(mu_a | a)
    std::vector<double> ref(m.MA, 0.0);
    double ref_mass = 0.0;
    for (std::size_t pr = 0; pr < m.n_pairs; ++pr) {
      if (m.a_group[pr] != g) continue;
      for (std::size_t ma = 0; ma < m.MA; ++ma) {
        ref[ma] += m.w[pr] * m.muA[pr * m.MA + ma];
      }
      ref_mass += m.w[pr];
    }
    if (ref_mass <= kMassEps) continue;
    for (auto& r : ref) r /= ref_mass;

    for (std::size_t pr = 0; pr < m.n_pairs; ++pr) {
      if (m.a_group[pr] != g) continue;
      // clause: remote setting b
      ++v.cells_tested;
      double tv_b = 0.0;
      for (std::size_t ma = 0; ma < m.MA; ++ma) {
        tv_b += std::abs(m.muA[pr * m.MA + ma] - ref[ma]);
      }
      track_max(v, 0.5 * tv_b,
                "P(mu_a) depends on remote setting: " + pair_label(table.policy, pr));
      // clause: remote outcome B, conditioned jointly with b
      for (int bi = 0; bi < 2; ++bi) {
        double cell_mass = 0.0;
        for (std::size_t ma = 0; ma < m.MA; ++ma) {
          cell_mass += m.muA_B[(pr * m.MA + ma) * 2 + bi];
        }
        if (cell_mass <= kMassEps) continue;
        ++v.cells_tested;
        double tv = 0.0;
        for (std::size_t ma = 0; ma < m.MA; ++ma) {
          tv += std::abs(m.muA_B[(pr * m.MA + ma) * 2 + bi] / cell_mass - ref[ma]);
        }
        track_max(v, 0.5 * tv,
                  "P(mu_a) depends on remote outcome: " +
                      pair_label(table.policy, pr) +
                      " B=" + (bi ? "+1" : "-1"));
      }
    }
  }

  // side B, mirrored
  for (std::size_t g = 0; g < m.n_b_groups; ++g) {
    std::vector<double> ref(m.MB, 0.0);
    double ref_mass = 0.0;
    for (std::size_t pr = 0; pr < m.n_pairs; ++pr) {
      if (m.b_group[pr] != g) continue;
      for (std::size_t mb = 0; mb < m.MB; ++mb) {
        ref[mb] += m.w[pr] * m.muB[pr * m.MB + mb];
      }
      ref_mass += m.w[pr];
    }
    if (ref_mass <= kMassEps) continue;
    for (auto& r : ref) r /= ref_mass;

    for (std::size_t pr = 0; pr < m.n_pairs; ++pr) {
      if (m.b_group[pr] != g) continue;
      ++v.cells_tested;
      double tv_a = 0.0;
      for (std::size_t mb = 0; mb < m.MB; ++mb) {
        tv_a += std::abs(m.muB[pr * m.MB + mb] - ref[mb]);
      }
      track_max(v, 0.5 * tv_a,
                "P(mu_b) depends on remote setting: " + pair_label(table.policy, pr));
      for (int ai = 0; ai < 2; ++ai) {
        double cell_mass = 0.0;
        for (std::size_t mb = 0; mb < m.MB; ++mb) {
          cell_mass += m.muB_A[(pr * m.MB + mb) * 2 + ai];
        }
        if (cell_mass <= kMassEps) continue;
        ++v.cells_tested;
        double tv = 0.0;
        for (std::size_t mb = 0; mb < m.MB; ++mb) {
          tv += std::abs(m.muB_A[(pr * m.MB + mb) * 2 + ai] / cell_mass - ref[mb]);
        }
        track_max(v, 0.5 * tv,
                  "P(mu_b) depends on remote outcome: " +
                      pair_label(table.policy, pr) +
                      " A=" + (ai ? "+1" : "-1"));
      }
    }
  }

  v.passed = v.divergence <= tol;
  return v;
}

AuditVerdict audit_parameter_independence(const ExactJointTable& table,
                                          double tol) {
  Marginals m(table);
  AuditVerdict v = base_verdict(Condition::ParameterIndependence);
  for (std::size_t pr = 0; pr < m.n_pairs; ++pr) {
    for (std::size_t l = 0; l < m.L; ++l) {
      if (m.mass(pr, l) <= kMassEps) continue;
      ++v.cells_tested;
      for (int ai = 0; ai < 2; ++ai) {
        double gap =
            std::abs(m.pA(pr, l, ai) - m.pooledA(m.a_group[pr], l, ai).first);
        track_max(v, gap,
                  "P(A) depends on remote setting: " + pair_label(table.policy, pr) +
                      " lambda=" + table.lambda_label(l) +
                      " A=" + (ai ? "+1" : "-1"));
      }
      for (int bi = 0; bi < 2; ++bi) {
        double gap =
            std::abs(m.pB(pr, l, bi) - m.pooledB(m.b_group[pr], l, bi).first);
        track_max(v, gap,
                  "P(B) depends on remote setting: " + pair_label(table.policy, pr) +
                      " lambda=" + table.lambda_label(l) +
                      " B=" + (bi ? "+1" : "-1"));
      }
    }
  }
  v.passed = v.divergence <= tol;
  return v;
}

AuditVerdict audit_outcome_independence(const ExactJointTable& table, double tol) {
  Marginals m(table);
  AuditVerdict v = base_verdict(Condition::OutcomeIndependence);
  for (std::size_t pr = 0; pr < m.n_pairs; ++pr) {
    for (std::size_t l = 0; l < m.L; ++l) {
      if (m.mass(pr, l) <= kMassEps) continue;
      ++v.cells_tested;
      for (int ai = 0; ai < 2; ++ai) {
        for (int bi = 0; bi < 2; ++bi) {
          double joint = m.jab(pr, l, ai, bi) / m.mass(pr, l);
          double gap = std::abs(joint - m.pA(pr, l, ai) * m.pB(pr, l, bi));
          track_max(v, gap,
                    pair_label(table.policy, pr) + " lambda=" +
                        table.lambda_label(l) + " A=" + (ai ? "+1" : "-1") +
                        " B=" + (bi ? "+1" : "-1"));
        }
      }
    }
  }
  v.passed = v.divergence <= tol;
  return v;
}

AuditVerdict audit_inverted_oi_pattern(const ExactJointTable& table, double tol) {
  Marginals m(table);
  AuditVerdict v = base_verdict(Condition::InvertedOiPattern);
  double eq_div = 0.0;    // P(A|B,a,b,l) vs P(A|B,a,l): must vanish
  double ineq_div = 0.0;  // P(A|B,a,l) vs P(A|a,l): must not vanish
  std::string eq_witness, ineq_witness;

  for (std::size_t g = 0; g < m.n_a_groups; ++g) {
    for (std::size_t l = 0; l < m.L; ++l) {
      for (int bi = 0; bi < 2; ++bi) {
        // pooled P(A | B=bi, a-group g, l)
        double num = 0.0, den = 0.0;
        for (std::size_t pr = 0; pr < m.n_pairs; ++pr) {
          if (m.a_group[pr] != g) continue;
          num += m.w[pr] * m.jab(pr, l, 1, bi);
          den += m.w[pr] * (m.jab(pr, l, 0, bi) + m.jab(pr, l, 1, bi));
        }
        if (den <= kMassEps) continue;
        double pooled_cond = num / den;
        ++v.cells_tested;

        for (std::size_t pr = 0; pr < m.n_pairs; ++pr) {
          if (m.a_group[pr] != g) continue;
          double cell = m.jab(pr, l, 0, bi) + m.jab(pr, l, 1, bi);
          if (cell <= kMassEps) continue;
          double cond = m.jab(pr, l, 1, bi) / cell;
          double gap = std::abs(cond - pooled_cond);
          if (gap > eq_div) {
            eq_div = gap;
            eq_witness = "P(A|B) varies with remote setting: " +
                         pair_label(table.policy, pr) + " lambda=" +
                         table.lambda_label(l) + " B=" + (bi ? "+1" : "-1");
          }
        }

        auto [marg, marg_mass] = m.pooledA(g, l, 1);
        if (marg_mass <= kMassEps) continue;
        double gap = std::abs(pooled_cond - marg);
        if (gap > ineq_div) {
          ineq_div = gap;
          ineq_witness = "P(A|B) differs from P(A): a-group " +
                         std::to_string(g) + " lambda=" + table.lambda_label(l) +
                         " B=" + (bi ? "+1" : "-1");
        }
      }
    }
  }

  v.divergence = ineq_div;
  v.secondary_divergence = eq_div;
  v.passed = eq_div <= tol && ineq_div > tol;
  v.witness = eq_div > tol ? eq_witness
              : v.passed  ? ineq_witness
                          : "no remote-outcome dependence found";
  return v;
}

std::vector<AuditVerdict> audit_all_exact(const ExactJointTable& table, double tol) {
  return {
      audit_factorizability(table, tol),
      audit_settings_independence(table, tol),
      audit_microstate_independence(table, tol),
      audit_parameter_independence(table, tol),
      audit_outcome_independence(table, tol),
      audit_inverted_oi_pattern(table, tol),
  };
}

}  // namespace bellsim
