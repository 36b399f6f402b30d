#include "contractlab/stats.hpp"

#include "contractlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace contractlab::stats {

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b)
// (Numerical Recipes form). Caller guarantees x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 300;
    constexpr double kTarget = 1e-12;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kTarget) {
            return h;
        }
    }
    throw NumericError("incomplete beta continued fraction did not converge within 300 iterations");
}

}  // namespace

DescriptiveStats describe(std::span<const double> samples) {
    if (samples.empty()) {
        throw DataError("describe: empty sample");
    }
    for (const double x : samples) {
        if (!std::isfinite(x)) {
            throw DomainError("describe: samples must be finite");
        }
    }
    const auto n = samples.size();
    const double nd = static_cast<double>(n);

    DescriptiveStats out;
    out.n = n;

    double sum = 0.0;
    for (const double x : samples) {
        sum += x;
    }
    out.mean = sum / nd;

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    out.minimum = sorted.front();
    out.maximum = sorted.back();
    out.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (const double x : samples) {
        const double d = x - out.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    out.std_dev = (n > 1) ? std::sqrt(m2 / (nd - 1.0)) : 0.0;
    m2 /= nd;
    m3 /= nd;
    m4 /= nd;

    if (m2 > 0.0) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.kurtosis = m4 / (m2 * m2);
    }
    return out;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("regularized_incomplete_beta: a and b must be positive");
    }
    if (std::isnan(x) || x < 0.0 || x > 1.0) {
        throw DomainError("regularized_incomplete_beta: x must be in [0, 1]");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (x == 1.0) {
        return 1.0;
    }
    const double log_prefactor = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                 a * std::log(x) + b * std::log1p(-x);
    const double prefactor = std::exp(log_prefactor);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return prefactor * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - prefactor * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) {
        throw DomainError("student_t_cdf: degrees of freedom must be positive");
    }
    if (std::isnan(t)) {
        throw DomainError("student_t_cdf: t must not be NaN");
    }
    if (t == 0.0) {
        return 0.5;
    }
    if (std::isinf(t)) {
        return t > 0.0 ? 1.0 : 0.0;
    }
    // P(T > |t|) = I_x(df/2, 1/2) / 2 with x = df / (df + t^2).
    const double x = df / (df + t * t);
    const double upper_tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
    return t > 0.0 ? 1.0 - upper_tail : upper_tail;
}

double two_sided_p(double t, double df) {
    if (!(df > 0.0)) {
        throw DomainError("two_sided_p: degrees of freedom must be positive");
    }
    if (std::isnan(t)) {
        throw DomainError("two_sided_p: t must not be NaN");
    }
    if (t == 0.0) {
        return 1.0;
    }
    if (std::isinf(t)) {
        return 0.0;
    }
    const double x = df / (df + t * t);
    const double p = regularized_incomplete_beta(0.5 * df, 0.5, x);
    return std::min(1.0, p);
}

}  // namespace contractlab::stats
