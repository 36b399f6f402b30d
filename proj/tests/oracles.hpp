// Test-only reference implementations, kept independent of the library code
// they check.
#pragma once

#include "contractlab/marketdata.hpp"
#include "contractlab/synth.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracles {

/// Day of week by Sakamoto's method: 0 = Sunday .. 6 = Saturday.
/// Independent of <chrono>.
inline int day_of_week(int y, int m, int d) {
    static const int offsets[] = {0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4};
    if (m < 3) {
        y -= 1;
    }
    return (y + y / 4 - y / 100 + y / 400 + offsets[m - 1] + d) % 7;
}

/// Standard normal CDF via the complementary error function.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Pairwise (cascade) summation.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (const double x : xs) {
            s += x;
        }
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

struct OracleFit {
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_stats;
};

/// Explicit normal-equation least squares: forms X'X and X'y with pairwise
/// summation, solves by Gauss-Jordan with partial pivoting, and reads the
/// standard errors off the inverse.
inline OracleFit normal_equation_ols(const std::vector<std::vector<double>>& columns,
                                     const std::vector<double>& y) {
    const std::size_t p = columns.size();
    const std::size_t n = y.size();

    std::vector<double> xtx(p * p);
    std::vector<double> xty(p);
    std::vector<double> products(n);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) {
            for (std::size_t i = 0; i < n; ++i) {
                products[i] = columns[a][i] * columns[b][i];
            }
            xtx[a * p + b] = pairwise_sum(products);
        }
        for (std::size_t i = 0; i < n; ++i) {
            products[i] = columns[a][i] * y[i];
        }
        xty[a] = pairwise_sum(products);
    }

    // Gauss-Jordan inversion of X'X.
    std::vector<double> inv(p * p, 0.0);
    std::vector<double> work = xtx;
    for (std::size_t i = 0; i < p; ++i) {
        inv[i * p + i] = 1.0;
    }
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r) {
            if (std::fabs(work[r * p + col]) > std::fabs(work[pivot * p + col])) {
                pivot = r;
            }
        }
        if (work[pivot * p + col] == 0.0) {
            throw std::runtime_error("oracle: singular normal equations");
        }
        for (std::size_t c = 0; c < p; ++c) {
            std::swap(work[pivot * p + c], work[col * p + c]);
            std::swap(inv[pivot * p + c], inv[col * p + c]);
        }
        const double diag = work[col * p + col];
        for (std::size_t c = 0; c < p; ++c) {
            work[col * p + c] /= diag;
            inv[col * p + c] /= diag;
        }
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) {
                continue;
            }
            const double factor = work[r * p + col];
            for (std::size_t c = 0; c < p; ++c) {
                work[r * p + c] -= factor * work[col * p + c];
                inv[r * p + c] -= factor * inv[col * p + c];
            }
        }
    }

    OracleFit fit;
    fit.coefficients.resize(p);
    for (std::size_t r = 0; r < p; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < p; ++c) {
            s += inv[r * p + c] * xty[c];
        }
        fit.coefficients[r] = s;
    }

    std::vector<double> squared_residuals(n);
    for (std::size_t i = 0; i < n; ++i) {
        double fitted = 0.0;
        for (std::size_t c = 0; c < p; ++c) {
            fitted += columns[c][i] * fit.coefficients[c];
        }
        const double e = y[i] - fitted;
        squared_residuals[i] = e * e;
    }
    const double rss = pairwise_sum(squared_residuals);
    const double sigma2 = rss / static_cast<double>(n - p);

    fit.std_errors.resize(p);
    fit.t_stats.resize(p);
    for (std::size_t c = 0; c < p; ++c) {
        fit.std_errors[c] = std::sqrt(sigma2 * inv[c * p + c]);
        fit.t_stats[c] = fit.coefficients[c] / fit.std_errors[c];
    }
    return fit;
}

/// Panel with explicit rows, for fixtures. m runs high to low like a real
/// contract window.
inline contractlab::marketdata::ObservationPanel make_panel(
    std::span<const double> dv, std::span<const int> m, std::span<const double> v,
    std::span<const double> o) {
    contractlab::marketdata::ObservationPanel panel;
    panel.asset = {"test"};
    panel.contract = {2020, 1};
    contractlab::Date d(2019, 11, 1);
    for (std::size_t i = 0; i < dv.size(); ++i) {
        while (!d.is_weekday()) {
            d = d + 1;
        }
        panel.rows.push_back({d, dv[i], m[i], v[i], o[i]});
        d = d + 1;
    }
    return panel;
}

/// Random panel with a planted linear signal plus noise.
inline contractlab::marketdata::ObservationPanel random_panel(std::uint64_t seed, std::size_t n,
                                                              double noise_sigma) {
    contractlab::synth::Rng rng(seed);
    std::vector<double> dv(n), v(n), o(n);
    std::vector<int> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = static_cast<int>(n - 1 - i);
        v[i] = 1000.0 + 4000.0 * rng.uniform();
        o[i] = 500.0 + 2000.0 * rng.uniform();
        dv[i] = 4.0 + 0.25 * m[i] + 0.015 * v[i] - 0.02 * o[i] + noise_sigma * rng.normal();
    }
    return make_panel(dv, m, v, o);
}

}  // namespace oracles
