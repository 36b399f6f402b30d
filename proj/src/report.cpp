#include "contractlab/report.hpp"

#include "contractlab/errors.hpp"
#include "contractlab/version.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

namespace contractlab::report {

namespace {

using nlohmann::json;
using regress::Predictor;

constexpr Predictor kAllPredictors[] = {Predictor::m, Predictor::v, Predictor::o};

/// Fixed-point formatting; glibc printf rounds half to even on the exact
/// binary value, which is the convention for every rendered number.
std::string fmt_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

/// Shortest round-trip representation, used by csv output.
std::string fmt_full(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

int asset_rank(const std::string& name) {
    if (name == "bitcoin") return 0;
    if (name == "gold") return 1;
    if (name == "oil") return 2;
    return 3;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string now_utc_iso8601() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json scaling_to_json(const measures::ScalingPolicy& policy) {
    json overrides = json::object();
    for (const auto& [asset, divisor] : policy.activity_divisor_overrides) {
        overrides[asset] = divisor;
    }
    return json{{"dv_factor", policy.dv_factor},
                {"default_activity_divisor", policy.default_activity_divisor},
                {"activity_divisor_overrides", overrides}};
}

}  // namespace

Format format_from_string(std::string_view name) {
    if (name == "markdown" || name == "md") return Format::markdown;
    if (name == "csv") return Format::csv;
    if (name == "json") return Format::json;
    throw DomainError("unknown format '" + std::string(name) +
                      "' (expected markdown, csv, or json)");
}

std::string_view to_string(Format format) {
    switch (format) {
        case Format::markdown: return "markdown";
        case Format::csv: return "csv";
        case Format::json: return "json";
    }
    return "markdown";
}

std::string_view to_string(SeriesRole role) {
    switch (role) {
        case SeriesRole::spot_price: return "spot price";
        case SeriesRole::futures_price: return "futures price";
        case SeriesRole::volume: return "volume";
        case SeriesRole::open_interest: return "open interest";
    }
    return "";
}

int RenderOptions::decimals_for(const std::string& column) const {
    const auto it = decimals.find(column);
    if (it != decimals.end()) {
        if (it->second < 0) {
            throw DomainError("render options: decimals must be non-negative");
        }
        return it->second;
    }
    return column == "pct" ? 1 : 3;
}

bool DescKeyOrder::operator()(const DescKey& a, const DescKey& b) const {
    const int ra = asset_rank(a.asset.name);
    const int rb = asset_rank(b.asset.name);
    if (ra != rb) return ra < rb;
    if (a.asset.name != b.asset.name) return a.asset.name < b.asset.name;
    return static_cast<int>(a.role) < static_cast<int>(b.role);
}

std::string render_descriptives(const DescriptivesMap& table, const RenderOptions& opts) {
    if (table.empty()) {
        throw DataError("render_descriptives: empty table");
    }

    struct RowSpec {
        const char* label;
        double (*get)(const stats::DescriptiveStats&);
    };
    static constexpr RowSpec kRows[] = {
        {"Mean", [](const stats::DescriptiveStats& s) { return s.mean; }},
        {"Median", [](const stats::DescriptiveStats& s) { return s.median; }},
        {"Maximum", [](const stats::DescriptiveStats& s) { return s.maximum; }},
        {"Minimum", [](const stats::DescriptiveStats& s) { return s.minimum; }},
        {"Std Dev.", [](const stats::DescriptiveStats& s) { return s.std_dev; }},
    };

    const int prec = opts.decimals_for("stat");

    if (opts.format == Format::json) {
        json out;
        out["descriptive_statistics"] = json::array();
        for (const auto& [key, value] : table) {
            json entry{{"asset", key.asset.name},
                       {"role", std::string(to_string(key.role))},
                       {"n", value.n},
                       {"mean", value.mean},
                       {"median", value.median},
                       {"maximum", value.maximum},
                       {"minimum", value.minimum},
                       {"std_dev", value.std_dev}};
            entry["skewness"] = value.skewness ? json(*value.skewness) : json(nullptr);
            entry["kurtosis"] = value.kurtosis ? json(*value.kurtosis) : json(nullptr);
            out["descriptive_statistics"].push_back(std::move(entry));
        }
        if (opts.include_manifest && !opts.manifest.empty()) {
            out["manifest"] = json::parse(opts.manifest);
        }
        return out.dump(2) + "\n";
    }

    if (opts.format == Format::csv) {
        std::string out = "statistic";
        for (const auto& [key, value] : table) {
            out += ',' + csv_escape(key.asset.name + " " + std::string(to_string(key.role)));
        }
        out += '\n';
        for (const auto& row : kRows) {
            out += row.label;
            for (const auto& [key, value] : table) {
                out += ',' + fmt_full(row.get(value));
            }
            out += '\n';
        }
        out += "Skewness";
        for (const auto& [key, value] : table) {
            out += ',';
            out += value.skewness ? fmt_full(*value.skewness) : "";
        }
        out += '\n';
        out += "Kurtosis";
        for (const auto& [key, value] : table) {
            out += ',';
            out += value.kurtosis ? fmt_full(*value.kurtosis) : "";
        }
        out += '\n';
        return out;
    }

    std::string out = "| statistic |";
    for (const auto& [key, value] : table) {
        out += ' ' + key.asset.name + " " + std::string(to_string(key.role)) + " |";
    }
    out += "\n|---|";
    for (std::size_t i = 0; i < table.size(); ++i) {
        out += "---|";
    }
    out += '\n';
    for (const auto& row : kRows) {
        out += "| ";
        out += row.label;
        out += " |";
        for (const auto& [key, value] : table) {
            out += ' ' + fmt_fixed(row.get(value), prec) + " |";
        }
        out += '\n';
    }
    out += "| Skewness |";
    for (const auto& [key, value] : table) {
        out += ' ';
        out += value.skewness ? fmt_fixed(*value.skewness, prec) : "-";
        out += " |";
    }
    out += "\n| Kurtosis |";
    for (const auto& [key, value] : table) {
        out += ' ';
        out += value.kurtosis ? fmt_fixed(*value.kurtosis, prec) : "-";
        out += " |";
    }
    out += '\n';
    return out;
}

std::string render_comparison(const analysis::ComparisonReport& report, const RenderOptions& opts) {
    if (report.summaries.empty()) {
        throw DataError("render_comparison: no model summaries");
    }
    const int pct_prec = opts.decimals_for("pct");
    const int r2_prec = opts.decimals_for("adj_r2");

    if (opts.format == Format::json) {
        json out{{"asset", report.asset.name},
                 {"dependent", std::string(measures::to_string(report.dependent))},
                 {"alpha", report.alpha},
                 {"best", report.best.name()}};
        out["models"] = json::array();
        for (const auto& summary : report.summaries) {
            json entry{{"model", summary.model.name()},
                       {"mean_adj_r2", summary.mean_adj_r2},
                       {"contracts_used", summary.contracts_used},
                       {"contracts_failed", summary.contracts_failed}};
            json sig = json::object();
            json neg = json::object();
            for (const Predictor p : summary.model.predictors()) {
                const std::string key(1, regress::symbol(p));
                sig[key] = summary.pct_significant.at(p);
                const auto& maybe_neg = summary.pct_negative_given_significant.at(p);
                neg[key] = maybe_neg ? json(*maybe_neg) : json(nullptr);
            }
            entry["pct_significant"] = std::move(sig);
            entry["pct_negative_given_significant"] = std::move(neg);
            out["models"].push_back(std::move(entry));
        }
        if (opts.include_manifest && !opts.manifest.empty()) {
            out["manifest"] = json::parse(opts.manifest);
        }
        return out.dump(2) + "\n";
    }

    if (opts.format == Format::csv) {
        std::string out =
            "asset,dependent,alpha,model,pct_sig_m,pct_neg_m,pct_sig_v,pct_neg_v,"
            "pct_sig_o,pct_neg_o,mean_adj_r2,contracts_used,contracts_failed\n";
        for (const auto& summary : report.summaries) {
            out += csv_escape(report.asset.name) + ',' +
                   std::string(measures::to_string(report.dependent)) + ',' +
                   fmt_full(report.alpha) + ',' + summary.model.name();
            for (const Predictor p : kAllPredictors) {
                out += ',';
                if (summary.model.contains(p)) {
                    out += fmt_full(summary.pct_significant.at(p));
                }
                out += ',';
                if (summary.model.contains(p)) {
                    const auto& neg = summary.pct_negative_given_significant.at(p);
                    if (neg) {
                        out += fmt_full(*neg);
                    }
                }
            }
            out += ',' + fmt_full(summary.mean_adj_r2) + ',' +
                   std::to_string(summary.contracts_used) + ',' +
                   std::to_string(summary.contracts_failed) + '\n';
        }
        return out;
    }

    std::string out = "Model comparison for " + report.asset.name + " " +
                      std::string(measures::to_string(report.dependent)) + " (alpha " +
                      fmt_fixed(report.alpha, 2) + ", best model: " + report.best.name() + ")\n\n";
    out += "| model | m | (-) | v | (-) | o | (-) | mean adj R2 |\n";
    out += "|---|---|---|---|---|---|---|---|\n";
    for (const auto& summary : report.summaries) {
        out += "| " + summary.model.name() + " |";
        for (const Predictor p : kAllPredictors) {
            if (!summary.model.contains(p)) {
                out += "  |  |";
                continue;
            }
            const double pct = summary.pct_significant.at(p);
            std::string cell = fmt_fixed(pct, pct_prec);
            if (pct > opts.bold_threshold) {
                cell = "**" + cell + "**";
            }
            out += ' ' + cell + " |";
            const auto& neg = summary.pct_negative_given_significant.at(p);
            out += ' ';
            out += neg ? fmt_fixed(*neg, pct_prec) : "-";
            out += " |";
        }
        out += ' ' + fmt_fixed(summary.mean_adj_r2, r2_prec) + " |\n";
    }
    return out;
}

std::string render_contract_table(std::span<const analysis::ContractResult> results,
                                  const regress::ModelSpec& model, const RenderOptions& opts) {
    const bool model_present = std::any_of(results.begin(), results.end(),
                                           [&](const analysis::ContractResult& r) {
                                               return r.fits.find(model) != r.fits.end();
                                           });
    if (!model_present) {
        throw DataError("render_contract_table: model " + model.name() +
                        " was not fitted for any contract");
    }
    const int coef_prec = opts.decimals_for("coef");
    const int p_prec = opts.decimals_for("p");
    const int r2_prec = opts.decimals_for("adj_r2");

    if (opts.format == Format::json) {
        json out{{"model", model.name()}};
        out["contracts"] = json::array();
        for (const auto& result : results) {
            const auto it = result.fits.find(model);
            if (it == result.fits.end()) {
                continue;
            }
            json entry{{"contract", result.contract.label()}};
            if (const auto* fit = std::get_if<regress::RegressionFit>(&it->second)) {
                entry["n"] = fit->n;
                entry["r2"] = fit->r2;
                entry["adj_r2"] = fit->adj_r2;
                entry["terms"] = json::array();
                for (std::size_t j = 0; j < fit->coefficients.size(); ++j) {
                    const std::string term =
                        j == 0 ? "intercept" : std::string(1, regress::symbol(model.predictors()[j - 1]));
                    entry["terms"].push_back(
                        json{{"term", term},
                             {"coefficient", fit->coefficients[j]},
                             {"std_error", fit->std_errors[j]},
                             {"t_stat", fit->t_stats[j]},
                             {"p_value", fit->p_values[j]},
                             {"stars",
                              std::string(regress::star_suffix(
                                  regress::significance_stars(fit->p_values[j])))}});
                }
            } else {
                entry["error"] = std::get<analysis::FitFailure>(it->second).kind;
            }
            out["contracts"].push_back(std::move(entry));
        }
        if (opts.include_manifest && !opts.manifest.empty()) {
            out["manifest"] = json::parse(opts.manifest);
        }
        return out.dump(2) + "\n";
    }

    if (opts.format == Format::csv) {
        std::string out = "contract,n,term,coefficient,std_error,t_stat,p_value,stars,adj_r2,error\n";
        for (const auto& result : results) {
            const auto it = result.fits.find(model);
            if (it == result.fits.end()) {
                continue;
            }
            if (const auto* fit = std::get_if<regress::RegressionFit>(&it->second)) {
                for (std::size_t j = 0; j < fit->coefficients.size(); ++j) {
                    const std::string term =
                        j == 0 ? "intercept" : std::string(1, regress::symbol(model.predictors()[j - 1]));
                    out += result.contract.label() + ',' + std::to_string(fit->n) + ',' + term +
                           ',' + fmt_full(fit->coefficients[j]) + ',' + fmt_full(fit->std_errors[j]) +
                           ',' + fmt_full(fit->t_stats[j]) + ',' + fmt_full(fit->p_values[j]) + ',' +
                           std::string(regress::star_suffix(
                               regress::significance_stars(fit->p_values[j]))) +
                           ',' + fmt_full(fit->adj_r2) + ",\n";
                }
            } else {
                out += result.contract.label() + ",,,,,,,,," +
                       csv_escape(std::get<analysis::FitFailure>(it->second).kind) + '\n';
            }
        }
        return out;
    }

    std::string out = "Coefficients for model " + model.name() +
                      " (p-values in parentheses; *, **, *** mark 10%, 5%, 1% significance)\n\n";
    out += "| contract |";
    for (const Predictor p : model.predictors()) {
        out += ' ';
        out += regress::symbol(p);
        out += " |";
    }
    out += " adj R2 |\n|---|";
    for (std::size_t i = 0; i < model.size(); ++i) {
        out += "---|";
    }
    out += "---|\n";
    for (const auto& result : results) {
        const auto it = result.fits.find(model);
        if (it == result.fits.end()) {
            continue;
        }
        if (const auto* fit = std::get_if<regress::RegressionFit>(&it->second)) {
            out += "| " + result.contract.label() + " |";
            for (std::size_t j = 1; j < fit->coefficients.size(); ++j) {
                out += ' ' + fmt_fixed(fit->coefficients[j], coef_prec) +
                       std::string(regress::star_suffix(
                           regress::significance_stars(fit->p_values[j]))) +
                       " |";
            }
            out += ' ' + fmt_fixed(fit->adj_r2, r2_prec) + " |\n";
            out += "|  |";
            for (std::size_t j = 1; j < fit->coefficients.size(); ++j) {
                out += " (" + fmt_fixed(fit->p_values[j], p_prec) + ") |";
            }
            out += "  |\n";
        } else {
            out += "| " + result.contract.label() + " | " +
                   std::get<analysis::FitFailure>(it->second).kind;
            for (std::size_t j = 1; j < model.size(); ++j) {
                out += " |";
            }
            out += " |  |\n";
        }
    }
    return out;
}

std::string write_run_manifest(const RunSettings& settings) {
    json inputs = json::object();
    for (const auto& [path, digest] : settings.input_digests) {
        inputs[path] = digest;
    }
    json manifest{
        {"tool", kToolName},
        {"version", kToolVersion},
        {"command", settings.command},
        {"generated_at", settings.timestamp.empty() ? now_utc_iso8601() : settings.timestamp},
        {"window_days", settings.window_days},
        {"alpha", settings.alpha},
        {"scaling", scaling_to_json(settings.scaling)},
        {"conventions",
         json{{"std_dev", "sample, n-1 denominator"},
              {"skewness_kurtosis", "biased moment ratios; kurtosis non-excess (normal = 3)"},
              {"standard_errors", "classical OLS (no robust correction)"},
              {"p_values", "two-sided Student t"},
              {"basis_timing", "same-day closing spot and futures"},
              {"rng", "xoshiro256++ seeded via SplitMix64, Box-Muller normals"}}},
        {"digest_algorithm", "fnv1a64"},
        {"inputs", inputs},
    };
    if (!settings.dependent.empty()) {
        manifest["dependent"] = settings.dependent;
    }
    if (settings.seed) {
        manifest["seed"] = *settings.seed;
    }
    return manifest.dump(2) + "\n";
}

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace contractlab::report
