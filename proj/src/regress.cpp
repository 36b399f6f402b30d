#include "contractlab/regress.hpp"

#include "contractlab/errors.hpp"
#include "contractlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace contractlab::regress {

namespace {

constexpr double kRankTolerance = 1e-10;

std::string column_name(const ModelSpec& model, std::size_t j) {
    if (j == 0) {
        return "intercept";
    }
    return std::string(1, symbol(model.predictors()[j - 1]));
}

}  // namespace

char symbol(Predictor p) noexcept {
    switch (p) {
        case Predictor::m: return 'm';
        case Predictor::v: return 'v';
        case Predictor::o: return 'o';
    }
    return '?';
}

double predictor_value(const ObservationRow& row, Predictor p) noexcept {
    switch (p) {
        case Predictor::m: return static_cast<double>(row.m);
        case Predictor::v: return row.v;
        case Predictor::o: return row.o;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

ModelSpec::ModelSpec(std::initializer_list<Predictor> predictors)
    : ModelSpec(std::span<const Predictor>{predictors.begin(), predictors.size()}) {}

ModelSpec::ModelSpec(std::span<const Predictor> predictors)
    : predictors_(predictors.begin(), predictors.end()) {
    if (predictors_.empty()) {
        throw DomainError("model spec: at least one predictor required");
    }
    std::sort(predictors_.begin(), predictors_.end());
    if (std::adjacent_find(predictors_.begin(), predictors_.end()) != predictors_.end()) {
        throw DomainError("model spec: duplicate predictor");
    }
}

ModelSpec ModelSpec::parse(std::string_view name) {
    std::vector<Predictor> predictors;
    for (const char c : name) {
        switch (c) {
            case 'm': predictors.push_back(Predictor::m); break;
            case 'v': predictors.push_back(Predictor::v); break;
            case 'o': predictors.push_back(Predictor::o); break;
            default:
                throw DomainError(std::string("model spec: unknown predictor '") + c +
                                  "' in '" + std::string(name) + "'");
        }
    }
    return ModelSpec(std::span<const Predictor>{predictors.data(), predictors.size()});
}

bool ModelSpec::contains(Predictor p) const noexcept {
    return std::find(predictors_.begin(), predictors_.end(), p) != predictors_.end();
}

std::string ModelSpec::name() const {
    std::string out;
    for (const Predictor p : predictors_) {
        out += symbol(p);
    }
    return out;
}

RegressionFit ols_fit(const ObservationPanel& panel, const ModelSpec& model) {
    const std::size_t n = panel.rows.size();
    const std::size_t k = model.size();
    const std::size_t p = k + 1;  // intercept column included
    if (k == 0) {
        throw DomainError("ols_fit: empty model");
    }
    if (n < k + 2) {
        throw InsufficientDataError("ols_fit: " + std::to_string(n) + " observations for " +
                                    std::to_string(k) + " predictors in " + panel.contract.label() +
                                    " (need at least " + std::to_string(k + 2) + ")");
    }

    // Design matrix, column-major, intercept first.
    std::vector<double> design(n * p);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = panel.rows[i];
        design[i] = 1.0;
        for (std::size_t j = 0; j < k; ++j) {
            design[(j + 1) * n + i] = predictor_value(row, model.predictors()[j]);
        }
        y[i] = row.dv;
    }
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(design[j * n + i])) {
                throw DomainError("ols_fit: non-finite value in column " + column_name(model, j));
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(y[i])) {
            throw DomainError("ols_fit: non-finite dependent value");
        }
    }

    // Householder QR, overwriting the work copy; qty accumulates Q'y.
    std::vector<double> work = design;
    std::vector<double> qty = y;
    std::vector<double> reflector(n);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return work[j * n + i]; };

    for (std::size_t j = 0; j < p; ++j) {
        double sigma = 0.0;
        for (std::size_t i = j; i < n; ++i) {
            sigma += at(i, j) * at(i, j);
        }
        const double norm = std::sqrt(sigma);
        if (norm == 0.0) {
            at(j, j) = 0.0;  // caught by the rank check below
            continue;
        }
        const double alpha = at(j, j) > 0.0 ? -norm : norm;
        double vnorm2 = 0.0;
        reflector[j] = at(j, j) - alpha;
        vnorm2 += reflector[j] * reflector[j];
        for (std::size_t i = j + 1; i < n; ++i) {
            reflector[i] = at(i, j);
            vnorm2 += reflector[i] * reflector[i];
        }
        at(j, j) = alpha;
        if (vnorm2 == 0.0) {
            continue;
        }
        for (std::size_t col = j + 1; col < p; ++col) {
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) {
                dot += reflector[i] * at(i, col);
            }
            const double scale = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < n; ++i) {
                at(i, col) -= scale * reflector[i];
            }
        }
        double dot = 0.0;
        for (std::size_t i = j; i < n; ++i) {
            dot += reflector[i] * qty[i];
        }
        const double scale = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < n; ++i) {
            qty[i] -= scale * reflector[i];
        }
    }

    // Rank check on the R diagonal, scale-relative.
    double max_diag = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        max_diag = std::max(max_diag, std::fabs(at(j, j)));
    }
    for (std::size_t j = 0; j < p; ++j) {
        if (std::fabs(at(j, j)) <= kRankTolerance * max_diag) {
            const std::string col = column_name(model, j);
            throw CollinearityError(col, "ols_fit: design matrix rank deficient in " +
                                             panel.contract.label() + ": column '" + col +
                                             "' is collinear (or constant)");
        }
    }

    // Back substitution: R beta = (Q'y)[0..p-1].
    std::vector<double> beta(p);
    for (std::size_t jj = p; jj-- > 0;) {
        double s = qty[jj];
        for (std::size_t l = jj + 1; l < p; ++l) {
            s -= at(jj, l) * beta[l];
        }
        beta[jj] = s / at(jj, jj);
    }

    // Residuals from the original design so fitted + residual == dv exactly.
    std::vector<double> fitted(n, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            fitted[i] += design[j * n + i] * beta[j];
        }
    }
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - fitted[i];
        rss += e * e;
    }

    double y_mean = 0.0;
    for (const double v : y) {
        y_mean += v;
    }
    y_mean /= static_cast<double>(n);
    double tss = 0.0;
    for (const double v : y) {
        tss += (v - y_mean) * (v - y_mean);
    }

    const double df = static_cast<double>(n - p);
    const double sigma2 = rss / df;

    // (X'X)^-1 = R^-1 R^-T; invert R by back substitution per unit column.
    std::vector<double> rinv(p * p, 0.0);
    for (std::size_t col = 0; col < p; ++col) {
        for (std::size_t jj = p; jj-- > 0;) {
            double s = (jj == col) ? 1.0 : 0.0;
            for (std::size_t l = jj + 1; l < p; ++l) {
                s -= at(jj, l) * rinv[col * p + l];
            }
            rinv[col * p + jj] = s / at(jj, jj);
        }
    }

    RegressionFit fit;
    fit.model = model;
    fit.n = n;
    fit.coefficients = beta;
    fit.std_errors.resize(p);
    fit.t_stats.resize(p);
    fit.p_values.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        double row_norm2 = 0.0;
        for (std::size_t l = j; l < p; ++l) {
            row_norm2 += rinv[l * p + j] * rinv[l * p + j];
        }
        const double se = std::sqrt(sigma2 * row_norm2);
        fit.std_errors[j] = se;
        if (se > 0.0) {
            fit.t_stats[j] = beta[j] / se;
        } else {
            // Exact fit: no sampling noise left. Coefficient zero carries no
            // evidence; anything else is infinitely significant.
            fit.t_stats[j] = beta[j] == 0.0 ? 0.0
                                            : std::copysign(std::numeric_limits<double>::infinity(),
                                                            beta[j]);
        }
        fit.p_values[j] = stats::two_sided_p(fit.t_stats[j], df);
    }

    if (tss > 0.0) {
        fit.r2 = std::clamp(1.0 - rss / tss, 0.0, 1.0);
    } else {
        fit.r2 = 0.0;
    }
    fit.adj_r2 = 1.0 - (1.0 - fit.r2) * (static_cast<double>(n) - 1.0) / df;
    return fit;
}

Stars significance_stars(double p) {
    if (std::isnan(p) || p < 0.0 || p > 1.0) {
        throw DomainError("significance_stars: p must be in [0, 1]");
    }
    if (p < 0.01) {
        return Stars::one_percent;
    }
    if (p < 0.05) {
        return Stars::five_percent;
    }
    if (p < 0.10) {
        return Stars::ten_percent;
    }
    return Stars::none;
}

std::string_view star_suffix(Stars stars) noexcept {
    switch (stars) {
        case Stars::none: return "";
        case Stars::ten_percent: return "*";
        case Stars::five_percent: return "**";
        case Stars::one_percent: return "***";
    }
    return "";
}

}  // namespace contractlab::regress
