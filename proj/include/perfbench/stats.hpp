#pragma once

#include <cstddef>
#include <span>

namespace perfbench::stats {

/// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
/// Continued-fraction evaluation, relative error below 1e-12 over the
/// parameter ranges used by the t distribution.
double incomplete_beta(double a, double b, double x);

/// Standard normal CDF.
double normal_cdf(double z);

/// Two-sided tail probability of Student's t with (possibly non-integer)
/// df degrees of freedom: P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

struct WelchResult {
  double t;
  double df;
  double p_value;
};

/// Welch two-sample t test (unequal variances), two-sided, with
/// Welch-Satterthwaite degrees of freedom. Requires >= 2 samples per side.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct MannWhitneyResult {
  double u_a;  // U statistic of the first sample
  double u_b;
  double z;        // normal deviate after continuity correction
  double p_value;  // two-sided, tie-corrected normal approximation
};

/// Mann-Whitney U test with midranks and tie-corrected variance.
/// p-value via normal approximation with continuity correction.
MannWhitneyResult mann_whitney_test(std::span<const double> a,
                                    std::span<const double> b);

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // n-1 denominator
double median(std::span<const double> xs);

}  // namespace perfbench::stats
