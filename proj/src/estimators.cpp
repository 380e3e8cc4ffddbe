#include "bellsim/estimators.hpp"

#include <cmath>
#include <cstdlib>

#include "bellsim/errors.hpp"
#include "bellsim/exact_table.hpp"
#include "bellsim/runner.hpp"

namespace bellsim {

ExpectationEstimate exact_expectation(const ModelSpec& model, const Direction& a,
                                      const Direction& b) {
  ExpectationEstimate est;
  est.method = Method::Exact;
  if (model.exact_E) {
    est.value = model.exact_E(a, b);
    return est;
  }
  if (model.exact_table) {
    auto table = model.exact_table(SettingsPolicy::single(a, b));
    if (table) {
      est.value = table->expectation(0);
      return est;
    }
  }
  throw NoExactInterface("model '" + model.id +
                         "' provides no exact expectation");
}

ExpectationEstimate mc_expectation(const Ensemble& ensemble, const Direction& a,
                                   const Direction& b, double match_tol) {
  auto matches = [match_tol](const Direction& u, const Direction& v) {
    return same_direction(u, v, match_tol);
  };
  std::uint64_t n = 0;
  double sum = 0.0;
  for (const auto& run : ensemble.runs) {
    if (!matches(run.setting_a, a) || !matches(run.setting_b, b)) continue;
    sum += static_cast<double>(run.outcome_a.value() * run.outcome_b.value());
    ++n;
  }
  if (n < 2) {
    throw InsufficientRuns("need at least 2 runs matching the requested settings, got " +
                           std::to_string(n));
  }
  ExpectationEstimate est;
  est.method = Method::MonteCarlo;
  est.n = n;
  est.value = sum / static_cast<double>(n);
  // products are +/-1, so the sample variance has closed form
  double nn = static_cast<double>(n);
  double var = (nn / (nn - 1.0)) * (1.0 - est.value * est.value);
  if (var < 0.0) var = 0.0;
  est.std_error = std::sqrt(var / nn);
  return est;
}

namespace {

template <typename Source, typename Eval>
ChshReport combine_chsh(const Source&, Eval eval, const Direction& a,
                        const Direction& ap, const Direction& b,
                        const Direction& bp) {
  ChshReport rep;
  rep.e_ab = eval(a, b);
  rep.e_abp = eval(a, bp);
  rep.e_apb = eval(ap, b);
  rep.e_apbp = eval(ap, bp);
  rep.method = rep.e_ab.method;
  rep.statistic = std::abs(rep.e_ab.value + rep.e_abp.value + rep.e_apb.value -
                           rep.e_apbp.value);
  double var = rep.e_ab.std_error * rep.e_ab.std_error +
               rep.e_abp.std_error * rep.e_abp.std_error +
               rep.e_apb.std_error * rep.e_apb.std_error +
               rep.e_apbp.std_error * rep.e_apbp.std_error;
  rep.std_error = std::sqrt(var);
  return rep;
}

}  // namespace

ChshReport chsh_statistic(const ModelSpec& model, const Direction& a,
                          const Direction& a_prime, const Direction& b,
                          const Direction& b_prime) {
  return combine_chsh(
      model,
      [&](const Direction& u, const Direction& v) {
        return exact_expectation(model, u, v);
      },
      a, a_prime, b, b_prime);
}

ChshReport chsh_statistic(const Ensemble& ensemble, const Direction& a,
                          const Direction& a_prime, const Direction& b,
                          const Direction& b_prime) {
  return combine_chsh(
      ensemble,
      [&](const Direction& u, const Direction& v) {
        return mc_expectation(ensemble, u, v);
      },
      a, a_prime, b, b_prime);
}

ChshReport chsh_statistic(const ModelSpec& model, const PaperDirections& dirs) {
  return chsh_statistic(model, dirs.a, dirs.a_prime, dirs.b, dirs.b_prime);
}

ChshReport chsh_statistic(const Ensemble& ensemble, const PaperDirections& dirs) {
  return chsh_statistic(ensemble, dirs.a, dirs.a_prime, dirs.b, dirs.b_prime);
}

PaperDirections paper_configuration() { return paper_directions(); }

std::vector<SweepRow> sweep_expectation(const ModelSpec& model,
                                        const std::vector<double>& thetas,
                                        std::uint64_t n_runs,
                                        std::uint64_t master_seed) {
  std::vector<SweepRow> rows;
  rows.reserve(thetas.size());
  Direction a{1.0, 0.0, 0.0};
  for (double theta : thetas) {
    Direction b = Direction::from_azimuth(theta);
    SweepRow row;
    row.theta = theta;
    row.e_exact = exact_expectation(model, a, b).value;
    Ensemble ens =
        run_experiment(model, SettingsPolicy::single(a, b), n_runs, master_seed);
    auto mc = mc_expectation(ens, a, b);
    row.e_mc = mc.value;
    row.std_error = mc.std_error;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bellsim
