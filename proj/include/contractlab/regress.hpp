#pragma once

#include "contractlab/marketdata.hpp"

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace contractlab::regress {

using marketdata::ObservationPanel;
using marketdata::ObservationRow;

/// Explanatory variables of the contract-by-contract regression.
enum class Predictor { m, v, o };

[[nodiscard]] char symbol(Predictor p) noexcept;
[[nodiscard]] double predictor_value(const ObservationRow& row, Predictor p) noexcept;

/// A non-empty subset of {m, v, o} kept in canonical order. Models compare
/// by size first, then lexicographically, which yields the enumeration order
/// m, v, o, mv, mo, vo, mvo.
class ModelSpec {
public:
    ModelSpec() = default;  // empty placeholder for containers; not a valid model
    ModelSpec(std::initializer_list<Predictor> predictors);
    explicit ModelSpec(std::span<const Predictor> predictors);

    /// Parses names like "m", "mv", "mvo" (any order, no duplicates).
    static ModelSpec parse(std::string_view name);

    [[nodiscard]] const std::vector<Predictor>& predictors() const noexcept { return predictors_; }
    [[nodiscard]] std::size_t size() const noexcept { return predictors_.size(); }
    [[nodiscard]] bool contains(Predictor p) const noexcept;
    [[nodiscard]] std::string name() const;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
    friend bool operator<(const ModelSpec& a, const ModelSpec& b) noexcept {
        if (a.predictors_.size() != b.predictors_.size()) {
            return a.predictors_.size() < b.predictors_.size();
        }
        return a.predictors_ < b.predictors_;
    }

private:
    std::vector<Predictor> predictors_;
};

/// Full OLS output for one contract and one model. Coefficient order is
/// intercept first, then the model's predictors in canonical order.
struct RegressionFit {
    ModelSpec model;
    std::size_t n = 0;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_stats;
    std::vector<double> p_values;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    bool dropped_collinear = false;
};

/// Fits dv = b0 + b' x by least squares via Householder QR of the design
/// matrix (intercept column of ones first). Standard errors come from the
/// R factor: (X'X)^-1 = R^-1 R^-T with sigma^2 = RSS / (n - k - 1), and
/// p-values from the two-sided t test with n - k - 1 degrees of freedom.
///
/// Throws InsufficientDataError when n < k + 2 and CollinearityError (naming
/// the offending column) when the design is rank deficient at a relative
/// tolerance of 1e-10 on the R diagonal.
[[nodiscard]] RegressionFit ols_fit(const ObservationPanel& panel, const ModelSpec& model);

/// Star levels used in coefficient tables: *, **, *** at 10%, 5%, 1%.
enum class Stars { none, ten_percent, five_percent, one_percent };

/// Strict thresholds: p < 0.01, p < 0.05, p < 0.10. p must lie in [0, 1].
[[nodiscard]] Stars significance_stars(double p);

[[nodiscard]] std::string_view star_suffix(Stars stars) noexcept;

}  // namespace contractlab::regress
