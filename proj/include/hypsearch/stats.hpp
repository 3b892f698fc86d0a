#pragma once

#include <vector>

namespace hypsearch {

struct Corr {
  double coefficient = 0.0;
  double p_value = 1.0;
};

// Kendall tau-b with tie correction; p-value from the normal approximation
// to the concordant-minus-discordant statistic with the tie-corrected
// variance. O(n log n). Requires both lengths equal and ≥ 2; throws
// ZeroVariance when either sequence is fully tied.
Corr kendall_tau(const std::vector<double>& a, const std::vector<double>& b);

// Pearson correlation of mid-ranks; p-value via the t-approximation with
// n - 2 degrees of freedom. Lengths equal and ≥ 3.
Corr spearman(const std::vector<double>& a, const std::vector<double>& b);

// Product-moment correlation; t-approximation p-value. Lengths equal and
// ≥ 3; both sides need nonzero variance.
Corr pearson(const std::vector<double>& a, const std::vector<double>& b);

// Average ranks for ties, 1-based.
std::vector<double> mid_ranks(const std::vector<double>& v);

// I_x(a, b) by the Lentz continued fraction; a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// P(|T| > |t|) for Student t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

// P(|Z| > |z|) for a standard normal.
double normal_two_sided_p(double z);

}  // namespace hypsearch
