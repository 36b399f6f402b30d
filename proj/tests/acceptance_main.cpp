// Acceptance suite: one pass/fail line per criterion, non-zero exit on any
// failure. Each criterion pins its tolerance and runtime budget in code.

#include "contractlab/analysis.hpp"
#include "contractlab/errors.hpp"
#include "contractlab/marketdata.hpp"
#include "contractlab/measures.hpp"
#include "contractlab/regress.hpp"
#include "contractlab/report.hpp"
#include "contractlab/stats.hpp"
#include "contractlab/synth.hpp"

#include "oracles.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace contractlab;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
    if (!condition) {
        throw Failure(message);
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// --- criterion bodies -------------------------------------------------------

void ols_oracle_equivalence() {
    const regress::ModelSpec mvo{regress::Predictor::m, regress::Predictor::v,
                                 regress::Predictor::o};
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto panel = oracles::random_panel(seed, 60, 2.5);
        const auto fit = regress::ols_fit(panel, mvo);

        std::vector<std::vector<double>> columns(4, std::vector<double>(panel.rows.size()));
        std::vector<double> y(panel.rows.size());
        for (std::size_t i = 0; i < panel.rows.size(); ++i) {
            columns[0][i] = 1.0;
            columns[1][i] = panel.rows[i].m;
            columns[2][i] = panel.rows[i].v;
            columns[3][i] = panel.rows[i].o;
            y[i] = panel.rows[i].dv;
        }
        const auto oracle = oracles::normal_equation_ols(columns, y);
        for (std::size_t j = 0; j < 4; ++j) {
            const auto rel = [](double a, double b) {
                return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-12});
            };
            require(rel(fit.coefficients[j], oracle.coefficients[j]) < 1e-8,
                    "coefficient mismatch at seed " + std::to_string(seed) + ": " +
                        fmt(fit.coefficients[j]) + " vs " + fmt(oracle.coefficients[j]));
            require(rel(fit.std_errors[j], oracle.std_errors[j]) < 1e-8,
                    "std error mismatch at seed " + std::to_string(seed));
            require(rel(fit.t_stats[j], oracle.t_stats[j]) < 1e-8,
                    "t-stat mismatch at seed " + std::to_string(seed));
        }
    }
}

void zero_noise_recovery() {
    synth::SynthConfig config;
    config.seed = 20180318;
    config.n_contracts = 47;
    config.window_days = 42;
    config.dgp_beta = {5.0, 0.3, 0.02, -0.01};
    config.noise_sigma = 0.0;
    const auto market = synth::generate_market(config);

    // Full pipeline: CSV export -> ingest -> panel -> fit.
    std::istringstream csv(marketdata::serialize_contract_csv(market.contracts));
    const auto parsed = marketdata::parse_contract_csv(csv);
    require(parsed.errors.empty(), "round-trip ingest produced row errors");
    require(parsed.series.size() == 47, "expected 47 contracts, got " +
                                            std::to_string(parsed.series.size()));

    const auto policy = measures::ScalingPolicy::defaults();
    const regress::ModelSpec mvo{regress::Predictor::m, regress::Predictor::v,
                                 regress::Predictor::o};
    for (const auto& series : parsed.series) {
        const auto panel = measures::build_panel(series, measures::DependentKind::volatility,
                                                 policy, config.window_days);
        const auto fit = regress::ols_fit(panel, mvo);
        for (int j = 0; j < 4; ++j) {
            const double err = std::fabs(fit.coefficients[j] - config.dgp_beta[j]);
            require(err < 1e-6, "beta[" + std::to_string(j) + "] off by " + fmt(err) + " in " +
                                    series.contract.label());
        }
    }
}

void null_calibration() {
    synth::SynthConfig config;
    config.seed = 424242;
    config.n_contracts = 200;
    config.window_days = 42;
    config.dgp_beta = {50.0, 0.0, 0.0, 0.0};
    config.noise_sigma = 5.0;
    const auto market = synth::generate_market(config);

    const regress::ModelSpec mvo{regress::Predictor::m, regress::Predictor::v,
                                 regress::Predictor::o};
    const std::vector<regress::ModelSpec> models{mvo};
    const auto results = analysis::run_contract_by_contract(market.truth.panels, models, 0.10);
    const auto summary = analysis::summarize(results, mvo, 0.10);
    require(summary.contracts_used == 200, "expected 200 fits");
    for (const auto p : {regress::Predictor::m, regress::Predictor::v, regress::Predictor::o}) {
        const double pct = summary.pct_significant.at(p);
        require(pct >= 5.0 && pct <= 15.0,
                std::string("pct significant for ") + regress::symbol(p) + " = " + fmt(pct) +
                    " outside [5, 15]");
    }
}

void parkinson_estimator() {
    const double v = measures::parkinson_volatility(2.0, 1.0);
    require(std::fabs(v - std::log(2.0) / 4.0) < 1e-12,
            "H/L = 2 gave " + fmt(v) + " instead of ln2/4");

    synth::Rng rng(777);
    for (int i = 0; i < 10000; ++i) {
        const double low = 0.5 + 99.5 * rng.uniform();
        const double high = low * (1.0 + 6.0 * rng.uniform());
        const double k = std::exp(-6.9 + 13.8 * rng.uniform());  // k in [1e-3, 1e3]
        const double base = measures::parkinson_volatility(high, low);
        const double scaled = measures::parkinson_volatility(k * high, k * low);
        require(std::fabs(scaled - base) < 1e-12,
                "scale invariance violated at draw " + std::to_string(i));
    }
}

void student_t_accuracy() {
    for (const double df : {0.5, 1.0, 7.0, 120.0, 1e6}) {
        require(stats::student_t_cdf(0.0, df) == 0.5, "cdf(0) not exactly 0.5");
    }
    require(std::fabs(stats::student_t_cdf(1.0, 1.0) - 0.75) < 1e-10,
            "Cauchy cdf(1) = " + fmt(stats::student_t_cdf(1.0, 1.0)));
    for (double t = -3.0; t <= 3.0 + 1e-9; t += 0.5) {
        const double got = stats::student_t_cdf(t, 1e6);
        const double want = oracles::normal_cdf(t);
        require(std::fabs(got - want) < 1e-4,
                "normal limit off at t = " + fmt(t) + ": " + fmt(got) + " vs " + fmt(want));
    }
}

void basis_convergence() {
    synth::SynthConfig config;
    config.seed = 99;
    config.n_contracts = 47;
    config.risk_free = 0.03;
    config.storage_cost = 0.01;
    config.convenience_yield = 0.005;
    const auto market = synth::generate_market(config);
    auto point = market.spot.points.begin();
    for (const auto& series : market.contracts) {
        const auto& final_bar = series.bars.back();
        point = market.spot.points.begin();
        while (point != market.spot.points.end() && point->date != final_bar.date) {
            ++point;
        }
        require(point != market.spot.points.end(), "final bar missing from the spot path");
        const double basis = measures::basis_pct(point->price, final_bar.close);
        require(std::fabs(basis) < 1e-12,
                "final-bar basis " + fmt(basis) + " in " + series.contract.label());
    }
}

void descriptive_statistics() {
    synth::Rng rng(123456);
    std::vector<double> xs(100000);
    for (auto& x : xs) {
        x = rng.normal();
    }
    const auto d = stats::describe(xs);
    require(std::fabs(d.mean) < 0.02, "mean " + fmt(d.mean));
    require(std::fabs(d.std_dev - 1.0) < 0.02, "std dev " + fmt(d.std_dev));
    require(d.skewness && std::fabs(*d.skewness) < 0.05, "skewness " + fmt(*d.skewness));
    require(d.kurtosis && std::fabs(*d.kurtosis - 3.0) < 0.15, "kurtosis " + fmt(*d.kurtosis));
}

void calendar() {
    require(last_friday(2018, 3) == Date(2018, 3, 30), "2018-03 last Friday wrong");
    require(last_friday(2021, 9) == Date(2021, 9, 24), "2021-09 last Friday wrong");
    require(last_friday(2021, 12) == Date(2021, 12, 31), "2021-12 last Friday wrong");
    for (int year = 1990; year <= 2100; ++year) {
        for (unsigned month = 1; month <= 12; ++month) {
            const Date d = last_friday(year, month);
            require(oracles::day_of_week(d.year(), static_cast<int>(d.month()),
                                         static_cast<int>(d.day())) == 5,
                    "not a Friday: " + d.iso());
        }
    }
}

struct CompareOutputs {
    std::string markdown;
    std::string csv;
    std::string json_text;
    std::string manifest;
};

CompareOutputs run_compare_pipeline(const std::string& contracts_csv, const std::string& ts) {
    std::istringstream in(contracts_csv);
    const auto parsed = marketdata::parse_contract_csv(in);
    require(parsed.errors.empty(), "parse errors in determinism input");

    const auto policy = measures::ScalingPolicy::defaults();
    std::vector<marketdata::ObservationPanel> panels;
    for (const auto& series : parsed.series) {
        panels.push_back(
            measures::build_panel(series, measures::DependentKind::volatility, policy, 42));
    }
    const auto report_data = analysis::compare_models(
        parsed.series.front().asset, measures::DependentKind::volatility, panels, 0.10);

    CompareOutputs out;
    report::RenderOptions opts;
    opts.format = report::Format::markdown;
    out.markdown = report::render_comparison(report_data, opts);
    opts.format = report::Format::csv;
    out.csv = report::render_comparison(report_data, opts);
    opts.format = report::Format::json;
    out.json_text = report::render_comparison(report_data, opts);

    report::RunSettings settings;
    settings.command = "compare";
    settings.dependent = "volatility";
    settings.timestamp = ts;
    settings.input_digests = {{"contracts.csv", report::fnv1a64_hex(contracts_csv)}};
    out.manifest = report::write_run_manifest(settings);
    return out;
}

void determinism() {
    synth::SynthConfig config;
    config.seed = 777;
    config.n_contracts = 12;
    config.noise_sigma = 2.0;
    const auto market = synth::generate_market(config);
    const auto csv = marketdata::serialize_contract_csv(market.contracts);

    const auto first = run_compare_pipeline(csv, "2026-01-01T00:00:00Z");
    const auto second = run_compare_pipeline(csv, "2026-01-02T00:00:00Z");
    require(first.markdown == second.markdown, "markdown output differs between runs");
    require(first.csv == second.csv, "csv output differs between runs");
    require(first.json_text == second.json_text, "json output differs between runs");

    auto a = nlohmann::json::parse(first.manifest);
    auto b = nlohmann::json::parse(second.manifest);
    require(a["generated_at"] != b["generated_at"], "timestamps should differ");
    a.erase("generated_at");
    b.erase("generated_at");
    require(a == b, "manifests differ beyond the timestamp");
}

void format_oracle() {
    analysis::ComparisonReport table2;
    table2.asset = {"bitcoin"};
    table2.dependent = measures::DependentKind::volatility;
    table2.alpha = 0.10;

    analysis::ModelSummary mvo_row;
    mvo_row.model = regress::ModelSpec{regress::Predictor::m, regress::Predictor::v,
                                       regress::Predictor::o};
    mvo_row.pct_significant = {{regress::Predictor::m, 48.9},
                               {regress::Predictor::v, 72.3},
                               {regress::Predictor::o, 0.0}};
    mvo_row.pct_negative_given_significant = {{regress::Predictor::m, 4.3},
                                              {regress::Predictor::v, 0.0},
                                              {regress::Predictor::o, std::nullopt}};
    mvo_row.mean_adj_r2 = 0.28;
    mvo_row.contracts_used = 47;
    table2.summaries = {mvo_row};
    table2.best = mvo_row.model;

    report::RenderOptions opts;
    const auto text = report::render_comparison(table2, opts);

    require(text.find("**72.3**") != std::string::npos, "72.3 should be bold (> 50)");
    require(text.find("**48.9**") == std::string::npos, "48.9 must not be bold");
    require(text.find("0.280") != std::string::npos, "mean adj R2 must print at 3 decimals");
    // o has no significant contracts: its share of negatives is "-", not 0
    const auto row = text.substr(text.find("| mvo |"));
    const auto cell_line = row.substr(0, row.find('\n'));
    require(cell_line.find("| - |") != std::string::npos,
            "undefined (-) percentage must render as '-'");

    // exactly at the threshold: not bold
    table2.summaries[0].pct_significant[regress::Predictor::v] = 50.0;
    const auto at_threshold = report::render_comparison(table2, opts);
    require(at_threshold.find("**50.0**") == std::string::npos, "50.0 must not be bold");
}

struct Criterion {
    int number;
    const char* name;
    double budget_seconds;
    std::function<void()> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "OLS oracle equivalence (100 panels, 1e-8 relative)", 5.0, ols_oracle_equivalence},
        {2, "zero-noise recovery through the CSV pipeline (1e-6)", 10.0, zero_noise_recovery},
        {3, "null calibration at alpha 0.10 (200 contracts)", 30.0, null_calibration},
        {4, "Parkinson estimator value and scale invariance (1e-12)", 5.0, parkinson_estimator},
        {5, "Student-t CDF fixed points and normal limit", 5.0, student_t_accuracy},
        {6, "basis converges to zero at expiry (1e-12)", 10.0, basis_convergence},
        {7, "descriptive statistics on 1e5 normal draws", 5.0, descriptive_statistics},
        {8, "last Friday calendar, exhaustive 1990-2100", 5.0, calendar},
        {9, "byte-identical compare outputs across runs", 10.0, determinism},
        {10, "comparison table format conventions", 5.0, format_oracle},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            criterion.body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (error.empty() && elapsed > criterion.budget_seconds) {
            error = "exceeded runtime budget of " + fmt(criterion.budget_seconds) + " s";
        }
        if (error.empty()) {
            std::printf("[PASS] %2d. %s (%.2f s)\n", criterion.number, criterion.name, elapsed);
        } else {
            std::printf("[FAIL] %2d. %s (%.2f s): %s\n", criterion.number, criterion.name,
                        elapsed, error.c_str());
            ++failures;
        }
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
    return 0;
}
