#include "contractlab/report.hpp"

#include "contractlab/errors.hpp"

#include "doctest.h"
#include "json.hpp"

#include <sstream>
#include <string>
#include <vector>

using namespace contractlab;
using namespace contractlab::report;
using nlohmann::json;
using regress::ModelSpec;
using regress::Predictor;

namespace {

stats::DescriptiveStats sample_stats() {
    stats::DescriptiveStats s;
    s.n = 1000;
    s.mean = 17432.9;
    s.median = 9416.0;
    s.maximum = 67734.0;
    s.minimum = 3156.9;
    s.std_dev = 16867.1;
    s.skewness = 1.44384;
    s.kurtosis = 3.61314;
    return s;
}

analysis::ComparisonReport sample_comparison() {
    analysis::ComparisonReport report;
    report.asset = {"bitcoin"};
    report.dependent = measures::DependentKind::volatility;
    report.alpha = 0.10;

    analysis::ModelSummary m_row;
    m_row.model = ModelSpec{Predictor::m};
    m_row.pct_significant[Predictor::m] = 21.3;
    m_row.pct_negative_given_significant[Predictor::m] = 50.0;
    m_row.mean_adj_r2 = 0.031;
    m_row.contracts_used = 47;

    analysis::ModelSummary mvo_row;
    mvo_row.model = ModelSpec{Predictor::m, Predictor::v, Predictor::o};
    mvo_row.pct_significant[Predictor::m] = 48.9;
    mvo_row.pct_significant[Predictor::v] = 72.3;
    mvo_row.pct_significant[Predictor::o] = 19.1;
    mvo_row.pct_negative_given_significant[Predictor::m] = 4.3;
    mvo_row.pct_negative_given_significant[Predictor::v] = 0.0;
    mvo_row.pct_negative_given_significant[Predictor::o] = 100.0;
    mvo_row.mean_adj_r2 = 0.280;
    mvo_row.contracts_used = 47;

    report.summaries = {m_row, mvo_row};
    report.best = mvo_row.model;
    return report;
}

std::vector<analysis::ContractResult> sample_results() {
    const ModelSpec mvo{Predictor::m, Predictor::v, Predictor::o};

    regress::RegressionFit fit;
    fit.model = mvo;
    fit.n = 42;
    fit.coefficients = {0.5, 0.043, 0.072, -0.083};
    fit.std_errors = {0.1, 0.02, 0.01, 0.02};
    fit.t_stats = {5.0, 2.15, 7.2, -4.15};
    fit.p_values = {0.001, 0.037, 0.0004, 0.0001};
    fit.r2 = 0.65;
    fit.adj_r2 = 0.621;

    regress::RegressionFit dull = fit;
    dull.coefficients = {0.5, 0.01, 0.002, -0.001};
    dull.p_values = {0.2, 0.55, 0.4, 0.3};
    dull.adj_r2 = 0.040;

    analysis::ContractResult first;
    first.contract = {2018, 3};
    first.fits.emplace(mvo, fit);
    analysis::ContractResult second;
    second.contract = {2018, 4};
    second.fits.emplace(mvo, dull);
    analysis::ContractResult third;
    third.contract = {2018, 5};
    third.fits.emplace(mvo, analysis::FitFailure{"insufficient data", "n too small"});
    return {first, second, third};
}

std::vector<std::string> markdown_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    std::getline(in, cell, '|');  // leading empty
    while (std::getline(in, cell, '|')) {
        const auto start = cell.find_first_not_of(' ');
        if (start == std::string::npos) {
            cells.push_back("");
        } else {
            const auto end = cell.find_last_not_of(' ');
            cells.push_back(cell.substr(start, end - start + 1));
        }
    }
    return cells;
}

}  // namespace

TEST_CASE("render_descriptives: one series gives a seven-row, one-column table") {
    DescriptivesMap table;
    table[{{"bitcoin"}, SeriesRole::spot_price}] = sample_stats();

    RenderOptions opts;
    const auto text = render_descriptives(table, opts);

    std::istringstream in(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    REQUIRE(lines.size() == 9);  // header + separator + 7 statistic rows
    CHECK(markdown_cells(lines[0])[1] == "bitcoin spot price");
    const char* expected[] = {"Mean", "Median", "Maximum", "Minimum",
                              "Std Dev.", "Skewness", "Kurtosis"};
    for (int i = 0; i < 7; ++i) {
        REQUIRE(markdown_cells(lines[2 + i])[0] == expected[i]);
        REQUIRE(markdown_cells(lines[2 + i]).size() == 2);
    }
}

TEST_CASE("render_descriptives: markdown parses back to the rendered precision") {
    DescriptivesMap table;
    table[{{"gold"}, SeriesRole::futures_price}] = sample_stats();
    RenderOptions opts;
    const auto text = render_descriptives(table, opts);

    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    const double expected[] = {17432.9, 9416.0, 67734.0, 3156.9, 16867.1, 1.44384, 3.61314};
    for (const double want : expected) {
        REQUIRE(std::getline(in, line));
        const auto cells = markdown_cells(line);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3f", want);
        REQUIRE(cells[1] == buf);
        REQUIRE(std::stod(cells[1]) == doctest::Approx(want).epsilon(5e-4));
    }
}

TEST_CASE("render_descriptives: undefined higher moments render as dashes and nulls") {
    stats::DescriptiveStats flat;
    flat.n = 3;
    flat.mean = flat.median = flat.maximum = flat.minimum = 5.0;
    flat.std_dev = 0.0;

    DescriptivesMap table;
    table[{{"oil"}, SeriesRole::volume}] = flat;

    RenderOptions md;
    const auto text = render_descriptives(table, md);
    CHECK(text.find("| Skewness | - |") != std::string::npos);

    RenderOptions js;
    js.format = Format::json;
    const auto parsed = json::parse(render_descriptives(table, js));
    CHECK(parsed["descriptive_statistics"][0]["skewness"].is_null());
    CHECK(parsed["descriptive_statistics"][0]["kurtosis"].is_null());
}

TEST_CASE("render_descriptives: json matches the documented schema") {
    DescriptivesMap table;
    table[{{"bitcoin"}, SeriesRole::spot_price}] = sample_stats();
    table[{{"bitcoin"}, SeriesRole::volume}] = sample_stats();

    RenderOptions opts;
    opts.format = Format::json;
    const auto parsed = json::parse(render_descriptives(table, opts));
    REQUIRE(parsed.contains("descriptive_statistics"));
    REQUIRE(parsed["descriptive_statistics"].is_array());
    for (const auto& entry : parsed["descriptive_statistics"]) {
        REQUIRE(entry["asset"].is_string());
        REQUIRE(entry["role"].is_string());
        REQUIRE(entry["n"].is_number_unsigned());
        for (const char* key : {"mean", "median", "maximum", "minimum", "std_dev"}) {
            REQUIRE(entry[key].is_number());
        }
    }
}

TEST_CASE("render_descriptives: column order is canonical") {
    DescriptivesMap table;
    table[{{"oil"}, SeriesRole::spot_price}] = sample_stats();
    table[{{"aluminium"}, SeriesRole::spot_price}] = sample_stats();
    table[{{"bitcoin"}, SeriesRole::futures_price}] = sample_stats();
    table[{{"bitcoin"}, SeriesRole::spot_price}] = sample_stats();

    RenderOptions opts;
    const auto text = render_descriptives(table, opts);
    const auto header = markdown_cells(text.substr(0, text.find('\n')));
    REQUIRE(header.size() == 5);
    CHECK(header[1] == "bitcoin spot price");
    CHECK(header[2] == "bitcoin futures price");
    CHECK(header[3] == "oil spot price");
    CHECK(header[4] == "aluminium spot price");
}

TEST_CASE("render_comparison: bold strictly above the threshold, dashes for undefined") {
    const auto report = sample_comparison();
    RenderOptions opts;
    const auto text = render_comparison(report, opts);

    CHECK(text.find("**72.3**") != std::string::npos);   // 72.3 > 50 is bold
    CHECK(text.find("**48.9**") == std::string::npos);   // below the threshold
    CHECK(text.find("| 19.1 |") != std::string::npos);   // present, un-bolded
    CHECK(text.find("0.280") != std::string::npos);      // mean adj R2 at 3 decimals
    CHECK(text.find("alpha 0.10") != std::string::npos); // recorded in the header
    // variables absent from the m model stay blank
    const auto m_line = text.substr(text.find("\n| m |") + 1);
    const auto cells = markdown_cells(m_line.substr(0, m_line.find('\n')));
    REQUIRE(cells.size() == 8);
    CHECK(cells[1] == "21.3");
    CHECK(cells[3] == "");  // v column blank
    CHECK(cells[5] == "");  // o column blank
}

TEST_CASE("render_comparison: a value exactly at the threshold is not bold") {
    auto report = sample_comparison();
    report.summaries[0].pct_significant[Predictor::m] = 50.0;
    RenderOptions opts;
    const auto text = render_comparison(report, opts);
    CHECK(text.find("**50.0**") == std::string::npos);
    CHECK(text.find("| 50.0 |") != std::string::npos);
}

TEST_CASE("render_comparison: undefined negative share renders as a dash") {
    auto report = sample_comparison();
    report.summaries[1].pct_negative_given_significant[Predictor::o] = std::nullopt;
    RenderOptions opts;
    const auto markdown = render_comparison(report, opts);
    // the mvo row's final (-) cell is "-"
    const auto row = markdown.substr(markdown.find("| mvo |"));
    const auto cells = markdown_cells(row.substr(0, row.find('\n')));
    CHECK(cells[6] == "-");
}

TEST_CASE("render_comparison: csv carries raw numbers without bold markers") {
    const auto report = sample_comparison();
    RenderOptions opts;
    opts.format = Format::csv;
    const auto text = render_comparison(report, opts);
    CHECK(text.find("**") == std::string::npos);
    CHECK(text.find("72.3") != std::string::npos);
    CHECK(text.find("0.28") != std::string::npos);

    opts.format = Format::json;
    const auto parsed = json::parse(render_comparison(report, opts));
    CHECK(parsed["best"] == "mvo");
    CHECK(parsed["alpha"] == 0.10);
    CHECK(parsed["models"][1]["pct_significant"]["v"] == 72.3);

    // csv and json carry identical numeric values at full precision
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);  // model m row
    const auto csv_cells = [&]() {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream in(line);
        while (std::getline(in, cell, ',')) {
            cells.push_back(cell);
        }
        return cells;
    }();
    CHECK(std::stod(csv_cells[4]) == parsed["models"][0]["pct_significant"]["m"].get<double>());
    CHECK(std::stod(csv_cells[10]) == parsed["models"][0]["mean_adj_r2"].get<double>());
}

TEST_CASE("render_contract_table: stars and parenthesised p-values") {
    const auto results = sample_results();
    const ModelSpec mvo{Predictor::m, Predictor::v, Predictor::o};
    RenderOptions opts;
    const auto text = render_contract_table(results, mvo, opts);

    CHECK(text.find("0.072***") != std::string::npos);  // p = 0.0004
    CHECK(text.find("(0.000)") != std::string::npos);
    CHECK(text.find("0.043**") != std::string::npos);   // p = 0.037
    CHECK(text.find("-0.083***") != std::string::npos);
    CHECK(text.find("| Mar-18 |") != std::string::npos);
    // p = 0.55 row: plain coefficient, no stars
    CHECK(text.find("0.002*") == std::string::npos);
    CHECK(text.find("| insufficient data") != std::string::npos);
}

TEST_CASE("render_contract_table: csv and json forms") {
    const auto results = sample_results();
    const ModelSpec mvo{Predictor::m, Predictor::v, Predictor::o};

    RenderOptions opts;
    opts.format = Format::csv;
    const auto csv = render_contract_table(results, mvo, opts);
    CHECK(csv.find("Mar-18,42,v,0.072,") != std::string::npos);
    CHECK(csv.find("May-18,,,,,,,,,insufficient data") != std::string::npos);

    opts.format = Format::json;
    const auto parsed = json::parse(render_contract_table(results, mvo, opts));
    CHECK(parsed["model"] == "mvo");
    REQUIRE(parsed["contracts"].size() == 3);
    CHECK(parsed["contracts"][0]["terms"][2]["stars"] == "***");
    CHECK(parsed["contracts"][2]["error"] == "insufficient data");

    const ModelSpec unfitted{Predictor::v};
    CHECK_THROWS_AS((void)render_contract_table(results, unfitted, opts), DataError);
}

TEST_CASE("run manifest: defaults echoed, stable apart from the timestamp") {
    RunSettings settings;
    settings.command = "compare";
    settings.dependent = "volatility";
    settings.input_digests = {{"contracts.csv", fnv1a64_hex("abc")}};

    const auto manifest = write_run_manifest(settings);
    auto parsed = json::parse(manifest);  // round-trips through the parser
    CHECK(parsed["alpha"] == 0.10);
    CHECK(parsed["window_days"] == 42);
    CHECK(parsed["tool"] == "contract-lab");
    CHECK(parsed["scaling"]["dv_factor"] == 10000.0);
    CHECK(parsed["scaling"]["activity_divisor_overrides"]["gold"] == 10000.0);
    CHECK(parsed["conventions"]["standard_errors"].get<std::string>().find("classical") !=
          std::string::npos);

    RunSettings later = settings;
    later.timestamp = "2099-01-01T00:00:00Z";
    settings.timestamp = "2098-01-01T00:00:00Z";
    auto a = json::parse(write_run_manifest(settings));
    auto b = json::parse(write_run_manifest(later));
    CHECK(a["generated_at"] != b["generated_at"]);
    a.erase("generated_at");
    b.erase("generated_at");
    CHECK(a == b);
}

TEST_CASE("manifest embedding in json output") {
    const auto report = sample_comparison();
    RunSettings settings;
    settings.command = "compare";
    settings.timestamp = "2026-01-01T00:00:00Z";

    RenderOptions opts;
    opts.format = Format::json;
    opts.include_manifest = true;
    opts.manifest = write_run_manifest(settings);
    const auto parsed = json::parse(render_comparison(report, opts));
    REQUIRE(parsed.contains("manifest"));
    CHECK(parsed["manifest"]["command"] == "compare");
    CHECK(parsed["manifest"]["alpha"] == 0.10);
}

TEST_CASE("fnv1a64 digest: fixed vectors") {
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a64_hex("hello") == "a430d84680aabd0b");
}

TEST_CASE("render options: per-column decimals") {
    RenderOptions opts;
    CHECK(opts.decimals_for("pct") == 1);
    CHECK(opts.decimals_for("adj_r2") == 3);
    opts.decimals = {{"pct", 2}};
    CHECK(opts.decimals_for("pct") == 2);
    opts.decimals = {{"coef", -1}};
    CHECK_THROWS_AS((void)opts.decimals_for("coef"), DomainError);
}
