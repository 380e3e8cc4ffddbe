#pragma once

#include <cstdint>
#include <vector>

namespace bellsim {

// Upper tail of the chi-squared distribution; df == 0 returns 1.
double chi_square_sf(double statistic, unsigned df);

struct Chi2Result {
  double statistic = 0.0;
  unsigned df = 0;
  double p_value = 1.0;
};

// Pearson chi-squared test of independence/homogeneity on an r x c count
// table (row-major). Rows and columns that are entirely zero are dropped
// before computing df. Degenerate tables (fewer than 2 live rows or columns)
// return p = 1.
Chi2Result chi2_contingency(const std::vector<std::vector<std::uint64_t>>& counts);

// Goodness of fit of observed counts against externally supplied cell
// probabilities, with an explicit df. Cells with probs[i] == 0 but
// observed[i] > 0 force p = 0.
Chi2Result chi2_goodness_of_fit(const std::vector<std::uint64_t>& observed,
                                const std::vector<double>& probs, unsigned df);

// Total variation distance between two discrete distributions given as counts
// (each normalized by its own total). Zero-total inputs give 0.
double total_variation(const std::vector<std::uint64_t>& lhs,
                       const std::vector<std::uint64_t>& rhs);

}  // namespace bellsim
