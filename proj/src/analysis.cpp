#include "contractlab/analysis.hpp"

#include "contractlab/errors.hpp"

#include <algorithm>

namespace contractlab::analysis {

std::vector<ModelSpec> enumerate_models() {
    static constexpr Predictor kAll[] = {Predictor::m, Predictor::v, Predictor::o};
    return enumerate_models(std::span<const Predictor>{kAll, 3});
}

std::vector<ModelSpec> enumerate_models(std::span<const Predictor> full_set) {
    std::vector<Predictor> base(full_set.begin(), full_set.end());
    std::sort(base.begin(), base.end());
    base.erase(std::unique(base.begin(), base.end()), base.end());

    std::vector<ModelSpec> models;
    const std::size_t n = base.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::vector<Predictor> subset;
        for (std::size_t bit = 0; bit < n; ++bit) {
            if (mask & (std::size_t{1} << bit)) {
                subset.push_back(base[bit]);
            }
        }
        models.emplace_back(std::span<const Predictor>{subset.data(), subset.size()});
    }
    std::sort(models.begin(), models.end());
    return models;
}

std::vector<ContractResult> run_contract_by_contract(std::span<const ObservationPanel> panels,
                                                     std::span<const ModelSpec> models,
                                                     double alpha) {
    if (panels.empty()) {
        throw DataError("run_contract_by_contract: no panels to analyse");
    }
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw DomainError("run_contract_by_contract: alpha must lie in (0, 1)");
    }

    std::vector<ContractResult> results;
    results.reserve(panels.size());
    for (const auto& panel : panels) {
        ContractResult result;
        result.contract = panel.contract;
        for (const auto& model : models) {
            try {
                result.fits.emplace(model, regress::ols_fit(panel, model));
            } catch (const InsufficientDataError& e) {
                result.fits.emplace(model, FitFailure{"insufficient data", e.what()});
            } catch (const CollinearityError& e) {
                result.fits.emplace(model, FitFailure{"collinear", e.what()});
            } catch (const NumericError& e) {
                result.fits.emplace(model, FitFailure{"numeric error", e.what()});
            } catch (const DomainError& e) {
                result.fits.emplace(model, FitFailure{"domain error", e.what()});
            }
        }
        results.push_back(std::move(result));
    }
    std::sort(results.begin(), results.end(),
              [](const ContractResult& a, const ContractResult& b) { return a.contract < b.contract; });
    return results;
}

ModelSummary summarize(std::span<const ContractResult> results, const ModelSpec& model,
                       double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw DomainError("summarize: alpha must lie in (0, 1)");
    }
    ModelSummary summary;
    summary.model = model;

    std::map<Predictor, std::size_t> significant;
    std::map<Predictor, std::size_t> negative_and_significant;
    double adj_r2_sum = 0.0;

    for (const auto& result : results) {
        const auto it = result.fits.find(model);
        if (it == result.fits.end()) {
            continue;
        }
        const auto* fit = std::get_if<RegressionFit>(&it->second);
        if (fit == nullptr) {
            ++summary.contracts_failed;
            continue;
        }
        ++summary.contracts_used;
        adj_r2_sum += fit->adj_r2;
        for (std::size_t j = 0; j < model.size(); ++j) {
            const Predictor p = model.predictors()[j];
            if (fit->p_values[j + 1] < alpha) {
                ++significant[p];
                if (fit->coefficients[j + 1] < 0.0) {
                    ++negative_and_significant[p];
                }
            }
        }
    }

    if (summary.contracts_used == 0) {
        throw DataError("summarize: no successful fit for model " + model.name());
    }

    const double used = static_cast<double>(summary.contracts_used);
    summary.mean_adj_r2 = adj_r2_sum / used;
    for (const Predictor p : model.predictors()) {
        const double sig = static_cast<double>(significant[p]);
        summary.pct_significant[p] = 100.0 * sig / used;
        if (significant[p] > 0) {
            summary.pct_negative_given_significant[p] =
                100.0 * static_cast<double>(negative_and_significant[p]) / sig;
        } else {
            summary.pct_negative_given_significant[p] = std::nullopt;
        }
    }
    return summary;
}

ModelSpec select_best(std::span<const ModelSummary> summaries) {
    if (summaries.empty()) {
        throw DataError("select_best: no summaries");
    }
    const ModelSummary* best = &summaries.front();
    for (const auto& candidate : summaries.subspan(1)) {
        if (candidate.mean_adj_r2 > best->mean_adj_r2) {
            best = &candidate;
        } else if (candidate.mean_adj_r2 == best->mean_adj_r2 && candidate.model < best->model) {
            // Ties prefer parsimony; ModelSpec ordering puts smaller models first.
            best = &candidate;
        }
    }
    return best->model;
}

ComparisonReport compare_models(const AssetId& asset, measures::DependentKind dependent,
                                std::span<const ObservationPanel> panels, double alpha) {
    ComparisonReport report;
    report.asset = asset;
    report.dependent = dependent;
    report.alpha = alpha;

    const auto models = enumerate_models();
    const auto results = run_contract_by_contract(panels, models, alpha);
    for (const auto& model : models) {
        try {
            report.summaries.push_back(summarize(results, model, alpha));
        } catch (const DataError&) {
            // Model never fitted successfully on any contract; leave it out.
        }
    }
    if (report.summaries.empty()) {
        throw DataError("compare_models: no model produced a successful fit");
    }
    report.best = select_best(report.summaries);
    return report;
}

}  // namespace contractlab::analysis
