#include "contractlab/analysis.hpp"
#include "contractlab/errors.hpp"
#include "contractlab/marketdata.hpp"
#include "contractlab/measures.hpp"
#include "contractlab/regress.hpp"
#include "contractlab/report.hpp"
#include "contractlab/stats.hpp"
#include "contractlab/synth.hpp"
#include "contractlab/version.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace contractlab;

namespace {

struct LoadedInput {
    std::string path;
    std::string bytes;
};

LoadedInput read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return LoadedInput{path, buf.str()};
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + out_path + "'");
    }
    out << text;
}

void print_row_errors(const std::vector<marketdata::RowError>& errors, const char* label) {
    for (const auto& e : errors) {
        std::cerr << label << " line " << e.line << " [" << marketdata::to_string(e.issue)
                  << "] " << e.message << "\n";
    }
}

marketdata::ContractParse load_contracts_strict(const LoadedInput& input) {
    std::istringstream stream(input.bytes);
    auto parsed = marketdata::parse_contract_csv(stream);
    if (!parsed.errors.empty()) {
        print_row_errors(parsed.errors, "error:");
        throw DataError(input.path + ": " + std::to_string(parsed.errors.size()) +
                        " bad row(s); fix the input or re-export it");
    }
    if (parsed.series.empty()) {
        throw DataError(input.path + ": no contract series found");
    }
    return parsed;
}

marketdata::SpotParse load_spot(const LoadedInput& input) {
    std::istringstream stream(input.bytes);
    auto parsed = marketdata::parse_spot_csv(stream);
    if (!parsed.errors.empty()) {
        print_row_errors(parsed.errors, "error:");
        throw DataError(input.path + ": " + std::to_string(parsed.errors.size()) + " bad row(s)");
    }
    return parsed;
}

std::vector<std::string> asset_names(const std::vector<marketdata::ContractSeries>& series) {
    std::vector<std::string> names;
    for (const auto& s : series) {
        if (std::find(names.begin(), names.end(), s.asset.name) == names.end()) {
            names.push_back(s.asset.name);
        }
    }
    return names;
}

const marketdata::SpotSeries* find_spot(const marketdata::SpotParse& spot,
                                        const std::string& asset) {
    for (const auto& s : spot.series) {
        if (s.asset.name == asset) {
            return &s;
        }
    }
    return nullptr;
}

struct CommonOptions {
    std::string contracts_path;
    std::string spot_path;
    std::string asset_filter;
    std::string dependent = "volatility";
    std::string format = "markdown";
    std::string out_path;
    std::string manifest_path;
    int window_days = 42;
    double alpha = 0.10;
};

report::RunSettings make_settings(const std::string& command, const CommonOptions& opts,
                                  const std::map<std::string, std::string>& digests) {
    report::RunSettings settings;
    settings.command = command;
    settings.dependent = opts.dependent;
    settings.window_days = opts.window_days;
    settings.alpha = opts.alpha;
    settings.scaling = measures::ScalingPolicy::defaults();
    settings.input_digests = digests;
    return settings;
}

void maybe_write_manifest(const std::string& path, const report::RunSettings& settings) {
    if (!path.empty()) {
        write_output(path, report::write_run_manifest(settings));
    }
}

/// Panels for one asset, ordered by contract month. Basis panels need the
/// asset's spot series.
std::vector<marketdata::ObservationPanel> build_panels(
    const std::vector<marketdata::ContractSeries>& series, const std::string& asset,
    const marketdata::SpotSeries* spot, measures::DependentKind kind,
    const measures::ScalingPolicy& policy, int window_days) {
    std::vector<marketdata::ObservationPanel> panels;
    for (const auto& s : series) {
        if (s.asset.name != asset) {
            continue;
        }
        if (kind == measures::DependentKind::basis) {
            if (spot == nullptr) {
                throw DataError("basis analysis for '" + asset +
                                "' requires --spot with a matching asset");
            }
            panels.push_back(measures::build_panel(s, *spot, kind, policy, window_days));
        } else {
            panels.push_back(measures::build_panel(s, kind, policy, window_days));
        }
    }
    std::sort(panels.begin(), panels.end(),
              [](const auto& a, const auto& b) { return a.contract < b.contract; });
    return panels;
}

int run_ingest(const CommonOptions& opts) {
    const auto input = read_file(opts.contracts_path);
    std::istringstream stream(input.bytes);
    auto parsed = marketdata::parse_contract_csv(stream);

    std::cout << "contracts: " << parsed.series.size() << " series\n";
    for (const auto& s : parsed.series) {
        if (!opts.asset_filter.empty() && s.asset.name != opts.asset_filter) {
            continue;
        }
        std::cout << "  " << s.asset.name << " " << s.contract.label() << ": "
                  << s.bars.size() << " bars, " << s.bars.front().date.iso() << " .. "
                  << s.bars.back().date.iso() << ", expiry " << s.expiry.iso() << "\n";
    }
    if (!opts.spot_path.empty()) {
        const auto spot_input = read_file(opts.spot_path);
        std::istringstream spot_stream(spot_input.bytes);
        auto spot = marketdata::parse_spot_csv(spot_stream);
        print_row_errors(spot.errors, "spot error:");
        for (const auto& s : spot.series) {
            std::cout << "spot " << s.asset.name << ": " << s.points.size() << " points, "
                      << s.points.front().date.iso() << " .. " << s.points.back().date.iso()
                      << "\n";
        }
        if (!spot.errors.empty()) {
            return 2;
        }
    }
    print_row_errors(parsed.warnings, "warning:");
    print_row_errors(parsed.errors, "error:");
    if (!parsed.errors.empty()) {
        std::cout << parsed.errors.size() << " row error(s)\n";
        return 2;
    }
    std::cout << "ok\n";
    return 0;
}

int run_describe(const CommonOptions& opts) {
    const auto input = read_file(opts.contracts_path);
    auto parsed = load_contracts_strict(input);

    std::map<std::string, std::string> digests{{opts.contracts_path,
                                                report::fnv1a64_hex(input.bytes)}};
    marketdata::SpotParse spot;
    if (!opts.spot_path.empty()) {
        const auto spot_input = read_file(opts.spot_path);
        digests[opts.spot_path] = report::fnv1a64_hex(spot_input.bytes);
        spot = load_spot(spot_input);
    }

    report::DescriptivesMap table;
    for (const auto& asset : asset_names(parsed.series)) {
        if (!opts.asset_filter.empty() && asset != opts.asset_filter) {
            continue;
        }
        std::vector<double> closes, volumes, open_interests;
        for (const auto& s : parsed.series) {
            if (s.asset.name != asset) {
                continue;
            }
            const auto windowed = marketdata::window_last_n(s, opts.window_days);
            for (const auto& bar : windowed.bars) {
                closes.push_back(bar.close);
                volumes.push_back(bar.volume);
                open_interests.push_back(bar.open_interest);
            }
        }
        const marketdata::AssetId id{asset};
        if (const auto* sp = find_spot(spot, asset)) {
            std::vector<double> prices;
            prices.reserve(sp->points.size());
            for (const auto& p : sp->points) {
                prices.push_back(p.price);
            }
            table[{id, report::SeriesRole::spot_price}] = stats::describe(prices);
        }
        table[{id, report::SeriesRole::futures_price}] = stats::describe(closes);
        table[{id, report::SeriesRole::volume}] = stats::describe(volumes);
        table[{id, report::SeriesRole::open_interest}] = stats::describe(open_interests);
    }

    report::RenderOptions render_opts;
    render_opts.format = report::format_from_string(opts.format);
    write_output(opts.out_path, report::render_descriptives(table, render_opts));
    maybe_write_manifest(opts.manifest_path, make_settings("describe", opts, digests));
    return 0;
}

int run_panel(const CommonOptions& opts) {
    if (opts.out_path.empty()) {
        throw DataError("panel: --out DIR is required");
    }
    const auto input = read_file(opts.contracts_path);
    auto parsed = load_contracts_strict(input);
    const auto kind = measures::dependent_from_string(opts.dependent);

    std::map<std::string, std::string> digests{{opts.contracts_path,
                                                report::fnv1a64_hex(input.bytes)}};
    marketdata::SpotParse spot;
    if (!opts.spot_path.empty()) {
        const auto spot_input = read_file(opts.spot_path);
        digests[opts.spot_path] = report::fnv1a64_hex(spot_input.bytes);
        spot = load_spot(spot_input);
    }

    fs::create_directories(opts.out_path);
    const auto policy = measures::ScalingPolicy::defaults();

    std::size_t files = 0;
    for (const auto& asset : asset_names(parsed.series)) {
        if (!opts.asset_filter.empty() && asset != opts.asset_filter) {
            continue;
        }
        const auto panels = build_panels(parsed.series, asset, find_spot(spot, asset), kind,
                                         policy, opts.window_days);
        for (const auto& panel : panels) {
            char month_tag[16];
            std::snprintf(month_tag, sizeof(month_tag), "%04d-%02u", panel.contract.year,
                          panel.contract.month);
            const fs::path file = fs::path(opts.out_path) /
                                  ("panel_" + asset + "_" + month_tag + ".csv");
            std::string csv = "date,dv,m,v,o\n";
            for (const auto& row : panel.rows) {
                char line[160];
                std::snprintf(line, sizeof(line), "%s,%.17g,%d,%.17g,%.17g\n",
                              row.date.iso().c_str(), row.dv, row.m, row.v, row.o);
                csv += line;
            }
            write_output(file.string(), csv);
            std::cout << file.string() << ": " << panel.rows.size() << " rows, "
                      << panel.dropped.size() << " dropped\n";
            for (const auto& drop : panel.dropped) {
                std::cout << "  dropped " << drop.date.iso() << ": " << drop.reason << "\n";
            }
            ++files;
        }
    }
    if (files == 0) {
        throw DataError("panel: no contracts matched");
    }
    maybe_write_manifest(opts.manifest_path, make_settings("panel", opts, digests));
    return 0;
}

struct AnalysisInputs {
    std::vector<std::string> assets;
    std::map<std::string, std::vector<marketdata::ObservationPanel>> panels_by_asset;
    std::map<std::string, std::string> digests;
};

AnalysisInputs prepare_analysis(const CommonOptions& opts) {
    const auto input = read_file(opts.contracts_path);
    auto parsed = load_contracts_strict(input);
    const auto kind = measures::dependent_from_string(opts.dependent);

    AnalysisInputs out;
    out.digests[opts.contracts_path] = report::fnv1a64_hex(input.bytes);
    marketdata::SpotParse spot;
    if (!opts.spot_path.empty()) {
        const auto spot_input = read_file(opts.spot_path);
        out.digests[opts.spot_path] = report::fnv1a64_hex(spot_input.bytes);
        spot = load_spot(spot_input);
    }

    const auto policy = measures::ScalingPolicy::defaults();
    for (const auto& asset : asset_names(parsed.series)) {
        if (!opts.asset_filter.empty() && asset != opts.asset_filter) {
            continue;
        }
        out.assets.push_back(asset);
        out.panels_by_asset[asset] = build_panels(parsed.series, asset, find_spot(spot, asset),
                                                  kind, policy, opts.window_days);
    }
    if (out.assets.empty()) {
        throw DataError("no contracts matched the requested asset");
    }
    return out;
}

int run_fit(const CommonOptions& opts, const std::string& model_name) {
    const auto inputs = prepare_analysis(opts);
    const auto model = regress::ModelSpec::parse(model_name);
    const std::vector<regress::ModelSpec> models{model};

    report::RenderOptions render_opts;
    render_opts.format = report::format_from_string(opts.format);

    std::string output;
    nlohmann::json json_out = nlohmann::json::array();
    for (const auto& asset : inputs.assets) {
        const auto& panels = inputs.panels_by_asset.at(asset);
        const auto results = analysis::run_contract_by_contract(panels, models, opts.alpha);
        const auto text = report::render_contract_table(results, model, render_opts);
        switch (render_opts.format) {
            case report::Format::markdown:
                output += "# " + asset + " (" + opts.dependent + ")\n\n" + text + "\n";
                break;
            case report::Format::csv: {
                if (output.empty()) {
                    output = "asset," + text.substr(0, text.find('\n') + 1);
                }
                std::istringstream lines(text);
                std::string line;
                std::getline(lines, line);  // skip header
                while (std::getline(lines, line)) {
                    output += asset + "," + line + "\n";
                }
                break;
            }
            case report::Format::json: {
                auto j = nlohmann::json::parse(text);
                j["asset"] = asset;
                j["dependent"] = opts.dependent;
                json_out.push_back(std::move(j));
                break;
            }
        }
    }
    if (render_opts.format == report::Format::json) {
        output = (json_out.size() == 1 ? json_out.front() : json_out).dump(2) + "\n";
    }
    write_output(opts.out_path, output);
    maybe_write_manifest(opts.manifest_path, make_settings("fit", opts, inputs.digests));
    return 0;
}

int run_compare(const CommonOptions& opts) {
    const auto inputs = prepare_analysis(opts);
    const auto kind = measures::dependent_from_string(opts.dependent);

    report::RenderOptions render_opts;
    render_opts.format = report::format_from_string(opts.format);

    std::string output;
    nlohmann::json json_out = nlohmann::json::array();
    for (const auto& asset : inputs.assets) {
        const auto& panels = inputs.panels_by_asset.at(asset);
        const auto report_data =
            analysis::compare_models(marketdata::AssetId{asset}, kind, panels, opts.alpha);
        const auto text = report::render_comparison(report_data, render_opts);
        switch (render_opts.format) {
            case report::Format::markdown:
                output += text + "\n";
                break;
            case report::Format::csv: {
                if (output.empty()) {
                    output = text;
                } else {
                    output += text.substr(text.find('\n') + 1);  // drop repeated header
                }
                break;
            }
            case report::Format::json:
                json_out.push_back(nlohmann::json::parse(text));
                break;
        }
    }
    if (render_opts.format == report::Format::json) {
        output = (json_out.size() == 1 ? json_out.front() : json_out).dump(2) + "\n";
    }
    write_output(opts.out_path, output);
    maybe_write_manifest(opts.manifest_path, make_settings("compare", opts, inputs.digests));
    return 0;
}

int run_synth(const synth::SynthConfig& config, const std::string& out_dir,
              const std::string& manifest_path) {
    const auto market = synth::generate_market(config);
    fs::create_directories(out_dir);

    const auto contracts_csv = marketdata::serialize_contract_csv(market.contracts);
    const auto spot_csv = marketdata::serialize_spot_csv(market.spot);
    const auto contracts_path = (fs::path(out_dir) / "contracts.csv").string();
    const auto spot_path = (fs::path(out_dir) / "spot.csv").string();
    write_output(contracts_path, contracts_csv);
    write_output(spot_path, spot_csv);

    nlohmann::json truth{{"true_beta", market.truth.true_beta},
                         {"asset", config.asset.name},
                         {"n_contracts", config.n_contracts},
                         {"window_days", config.window_days},
                         {"noise_sigma", config.noise_sigma},
                         {"seed", config.seed}};
    const auto truth_path = (fs::path(out_dir) / "truth.json").string();
    write_output(truth_path, truth.dump(2) + "\n");

    std::cout << contracts_path << ": " << market.contracts.size() << " contracts\n"
              << spot_path << ": " << market.spot.points.size() << " points\n"
              << truth_path << "\n";

    if (!manifest_path.empty()) {
        report::RunSettings settings;
        settings.command = "synth";
        settings.window_days = config.window_days;
        settings.seed = config.seed;
        settings.input_digests = {{contracts_path, report::fnv1a64_hex(contracts_csv)},
                                  {spot_path, report::fnv1a64_hex(spot_csv)}};
        write_output(manifest_path, report::write_run_manifest(settings));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contract-by-contract futures volatility and basis analysis"};
    app.require_subcommand(1);
    std::string version_line = std::string(kToolName) + " " + kToolVersion;
    app.set_version_flag("--version", version_line);

    CommonOptions opts;
    synth::SynthConfig synth_config;
    std::string model_name = "mvo";
    std::string synth_out = ".";
    std::string synth_manifest;

    const auto alpha_check = CLI::Validator(
        [](std::string& s) {
            const double v = std::strtod(s.c_str(), nullptr);
            return (v > 0.0 && v < 1.0) ? std::string{} : std::string("alpha must be in (0, 1)");
        },
        "ALPHA");

    auto add_common = [&](CLI::App* cmd, bool needs_dependent, bool needs_alpha) {
        cmd->add_option("--contracts", opts.contracts_path, "Contract chain CSV")
            ->required();
        cmd->add_option("--spot", opts.spot_path, "Spot price CSV");
        cmd->add_option("--asset", opts.asset_filter, "Only analyse this asset");
        cmd->add_option("--window-days", opts.window_days,
                        "Trading days kept per contract (last N)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        if (needs_dependent) {
            cmd->add_option("--dependent", opts.dependent, "Dependent variable")
                ->check(CLI::IsMember({"volatility", "basis"}))
                ->capture_default_str();
        }
        if (needs_alpha) {
            cmd->add_option("--alpha", opts.alpha, "Significance level")
                ->check(alpha_check)
                ->capture_default_str();
        }
        cmd->add_option("--format", opts.format, "Output format")
            ->check(CLI::IsMember({"markdown", "csv", "json"}))
            ->capture_default_str();
        cmd->add_option("--out", opts.out_path, "Output file (default stdout)");
        cmd->add_option("--manifest", opts.manifest_path, "Write a run manifest JSON here");
    };

    auto* ingest = app.add_subcommand("ingest", "Parse and validate input files");
    ingest->add_option("--contracts", opts.contracts_path, "Contract chain CSV")->required();
    ingest->add_option("--spot", opts.spot_path, "Spot price CSV");
    ingest->add_option("--asset", opts.asset_filter, "Only report this asset");

    auto* describe = app.add_subcommand("describe", "Descriptive statistics tables");
    add_common(describe, false, false);

    auto* panel = app.add_subcommand("panel", "Write per-contract observation CSVs");
    add_common(panel, true, false);

    auto* fit = app.add_subcommand("fit", "Per-contract coefficient table for one model");
    add_common(fit, true, true);
    fit->add_option("--model", model_name, "Predictor subset")
        ->check(CLI::IsMember({"m", "v", "o", "mv", "mo", "vo", "mvo"}))
        ->capture_default_str();

    auto* compare = app.add_subcommand("compare", "Compare all predictor subsets");
    add_common(compare, true, true);

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic market");
    synth_cmd->add_option("--out", synth_out, "Output directory")->capture_default_str();
    synth_cmd->add_option("--seed", synth_config.seed, "RNG seed")->capture_default_str();
    synth_cmd->add_option("--n-contracts", synth_config.n_contracts, "Number of monthly contracts")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth_cmd->add_option("--window-days", synth_config.window_days, "Bars per contract")
        ->check(CLI::Range(4, 1000000))
        ->capture_default_str();
    synth_cmd->add_option("--start-year", synth_config.start_year, "First contract year")
        ->capture_default_str();
    synth_cmd->add_option("--start-month", synth_config.start_month, "First contract month")
        ->check(CLI::Range(1, 12))
        ->capture_default_str();
    synth_cmd->add_option("--asset", synth_config.asset.name, "Asset name")
        ->capture_default_str();
    synth_cmd->add_option("--spot0", synth_config.spot0, "Initial spot price")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth_cmd->add_option("--drift", synth_config.drift, "Spot drift per year")
        ->capture_default_str();
    synth_cmd->add_option("--vol", synth_config.vol, "Spot volatility per year")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    synth_cmd->add_option("--risk-free", synth_config.risk_free, "Risk-free rate per year")
        ->capture_default_str();
    synth_cmd->add_option("--storage", synth_config.storage_cost, "Storage cost per year")
        ->capture_default_str();
    synth_cmd->add_option("--convenience", synth_config.convenience_yield,
                          "Convenience yield per year")
        ->capture_default_str();
    synth_cmd->add_option("--oi-peak", synth_config.oi_peak, "Peak open interest")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    synth_cmd->add_option("--volume-mean", synth_config.volume_mean, "Mean daily volume")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth_cmd->add_option("--beta0", synth_config.dgp_beta[0], "Planted intercept")
        ->capture_default_str();
    synth_cmd->add_option("--beta-m", synth_config.dgp_beta[1], "Planted maturity coefficient")
        ->capture_default_str();
    synth_cmd->add_option("--beta-v", synth_config.dgp_beta[2], "Planted volume coefficient")
        ->capture_default_str();
    synth_cmd->add_option("--beta-o", synth_config.dgp_beta[3], "Planted open-interest coefficient")
        ->capture_default_str();
    synth_cmd->add_option("--noise-sigma", synth_config.noise_sigma, "Noise std dev (dv units)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    synth_cmd->add_option("--manifest", synth_manifest, "Write a run manifest JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(ingest)) return run_ingest(opts);
        if (app.got_subcommand(describe)) return run_describe(opts);
        if (app.got_subcommand(panel)) return run_panel(opts);
        if (app.got_subcommand(fit)) return run_fit(opts, model_name);
        if (app.got_subcommand(compare)) return run_compare(opts);
        if (app.got_subcommand(synth_cmd)) return run_synth(synth_config, synth_out, synth_manifest);
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
