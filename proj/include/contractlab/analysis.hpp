#pragma once

#include "contractlab/marketdata.hpp"
#include "contractlab/measures.hpp"
#include "contractlab/regress.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace contractlab::analysis {

using marketdata::AssetId;
using marketdata::ContractMonth;
using marketdata::ObservationPanel;
using regress::ModelSpec;
using regress::Predictor;
using regress::RegressionFit;

/// A fit that could not be produced, with a stable kind used in reports:
/// "insufficient data", "collinear", "domain error", "numeric error".
struct FitFailure {
    std::string kind;
    std::string message;
};

using FitOutcome = std::variant<RegressionFit, FitFailure>;

[[nodiscard]] inline bool succeeded(const FitOutcome& outcome) noexcept {
    return std::holds_alternative<RegressionFit>(outcome);
}

/// Every requested model's outcome for one contract.
struct ContractResult {
    ContractMonth contract;
    std::map<ModelSpec, FitOutcome> fits;
};

/// The 7 non-empty subsets of {m, v, o} in canonical order
/// m, v, o, mv, mo, vo, mvo.
[[nodiscard]] std::vector<ModelSpec> enumerate_models();

/// Non-empty subsets of the given predictors, canonical order.
[[nodiscard]] std::vector<ModelSpec> enumerate_models(std::span<const Predictor> full_set);

/// Fits every (panel, model) pair independently; a failing fit is recorded
/// for that slot and never aborts the batch. Results are ordered by contract
/// month. Throws DataError when panels is empty and DomainError unless
/// 0 < alpha < 1.
[[nodiscard]] std::vector<ContractResult> run_contract_by_contract(
    std::span<const ObservationPanel> panels, std::span<const ModelSpec> models, double alpha);

/// Cross-contract aggregate for one model. Percentages are over successful
/// fits only; pct_negative_given_significant is absent for a variable with
/// no significant contracts.
struct ModelSummary {
    ModelSpec model;
    std::map<Predictor, double> pct_significant;
    std::map<Predictor, std::optional<double>> pct_negative_given_significant;
    double mean_adj_r2 = 0.0;
    std::size_t contracts_used = 0;
    std::size_t contracts_failed = 0;
};

/// A variable counts as significant when its p-value is strictly below alpha.
/// Throws DataError when the model has no successful fit.
[[nodiscard]] ModelSummary summarize(std::span<const ContractResult> results,
                                     const ModelSpec& model, double alpha);

/// Argmax of mean adjusted R^2; ties prefer fewer predictors, then canonical
/// order.
[[nodiscard]] ModelSpec select_best(std::span<const ModelSummary> summaries);

struct ComparisonReport {
    AssetId asset;
    measures::DependentKind dependent = measures::DependentKind::volatility;
    double alpha = 0.10;
    std::vector<ModelSummary> summaries;  // canonical model order
    ModelSpec best;
};

/// Full comparison pipeline: fit all models on all panels, summarize each,
/// pick the best.
[[nodiscard]] ComparisonReport compare_models(const AssetId& asset,
                                              measures::DependentKind dependent,
                                              std::span<const ObservationPanel> panels,
                                              double alpha);

}  // namespace contractlab::analysis
