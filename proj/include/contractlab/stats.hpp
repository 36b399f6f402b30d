#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace contractlab::stats {

/// Summary statistics matching the descriptive table layout: moments use the
/// biased (1/n) central-moment convention, the standard deviation uses the
/// unbiased (n-1) denominator, and kurtosis is non-excess (normal = 3).
/// Skewness and kurtosis are absent when the sample has zero variance.
struct DescriptiveStats {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double maximum = 0.0;
    double minimum = 0.0;
    double std_dev = 0.0;
    std::optional<double> skewness;
    std::optional<double> kurtosis;
};

/// Computes descriptive statistics over at least one finite sample.
/// The median averages the middle pair for even n.
[[nodiscard]] DescriptiveStats describe(std::span<const double> samples);

/// Regularized incomplete beta function I_x(a, b), evaluated by a modified
/// Lentz continued fraction with at most 300 iterations and convergence
/// target 1e-12. Throws NumericError if the fraction fails to converge.
[[nodiscard]] double regularized_incomplete_beta(double a, double b, double x);

/// CDF of Student's t distribution with df > 0 degrees of freedom, via
/// I_x(df/2, 1/2) with x = df / (df + t^2). Exactly 0.5 at t = 0.
[[nodiscard]] double student_t_cdf(double t, double df);

/// Two-sided p-value 2 * (1 - cdf(|t|)), symmetric in the sign of t.
[[nodiscard]] double two_sided_p(double t, double df);

}  // namespace contractlab::stats
