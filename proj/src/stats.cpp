#include "bellsim/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>

#include "bellsim/errors.hpp"

namespace bellsim {

double chi_square_sf(double statistic, unsigned df) {
  if (df == 0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(df));
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

Chi2Result chi2_contingency(const std::vector<std::vector<std::uint64_t>>& counts) {
  Chi2Result res;
  if (counts.empty()) return res;
  std::size_t n_cols = counts.front().size();
  for (const auto& row : counts) {
    if (row.size() != n_cols) throw InvalidArgument("ragged contingency table");
  }

  std::vector<std::uint64_t> row_tot(counts.size(), 0);
  std::vector<std::uint64_t> col_tot(n_cols, 0);
  std::uint64_t total = 0;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      row_tot[r] += counts[r][c];
      col_tot[c] += counts[r][c];
      total += counts[r][c];
    }
  }
  std::size_t live_rows = 0, live_cols = 0;
  for (auto t : row_tot) live_rows += (t > 0);
  for (auto t : col_tot) live_cols += (t > 0);
  if (live_rows < 2 || live_cols < 2 || total == 0) return res;

  double stat = 0.0;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    if (row_tot[r] == 0) continue;
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (col_tot[c] == 0) continue;
      double expected = static_cast<double>(row_tot[r]) *
                        static_cast<double>(col_tot[c]) /
                        static_cast<double>(total);
      double diff = static_cast<double>(counts[r][c]) - expected;
      stat += diff * diff / expected;
    }
  }
  res.statistic = stat;
  res.df = static_cast<unsigned>((live_rows - 1) * (live_cols - 1));
  res.p_value = chi_square_sf(stat, res.df);
  return res;
}

Chi2Result chi2_goodness_of_fit(const std::vector<std::uint64_t>& observed,
                                const std::vector<double>& probs, unsigned df) {
  if (observed.size() != probs.size()) {
    throw InvalidArgument("observed/probs size mismatch");
  }
  Chi2Result res;
  res.df = df;
  std::uint64_t total = 0;
  for (auto o : observed) total += o;
  if (total == 0) return res;

  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    double expected = probs[i] * static_cast<double>(total);
    if (expected <= 0.0) {
      if (observed[i] > 0) {
        res.statistic = std::numeric_limits<double>::infinity();
        res.p_value = 0.0;
        return res;
      }
      continue;
    }
    double diff = static_cast<double>(observed[i]) - expected;
    stat += diff * diff / expected;
  }
  res.statistic = stat;
  res.p_value = chi_square_sf(stat, df);
  return res;
}

double total_variation(const std::vector<std::uint64_t>& lhs,
                       const std::vector<std::uint64_t>& rhs) {
  if (lhs.size() != rhs.size()) throw InvalidArgument("TV size mismatch");
  std::uint64_t lt = 0, rt = 0;
  for (auto v : lhs) lt += v;
  for (auto v : rhs) rt += v;
  if (lt == 0 || rt == 0) return 0.0;
  double tv = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    tv += std::abs(static_cast<double>(lhs[i]) / static_cast<double>(lt) -
                   static_cast<double>(rhs[i]) / static_cast<double>(rt));
  }
  return 0.5 * tv;
}

}  // namespace bellsim
