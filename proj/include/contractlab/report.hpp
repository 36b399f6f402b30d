#pragma once

#include "contractlab/analysis.hpp"
#include "contractlab/measures.hpp"
#include "contractlab/stats.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace contractlab::report {

using marketdata::AssetId;

enum class Format { markdown, csv, json };

[[nodiscard]] Format format_from_string(std::string_view name);
[[nodiscard]] std::string_view to_string(Format format);

/// Which series of an asset a descriptive-statistics column refers to.
enum class SeriesRole { spot_price, futures_price, volume, open_interest };

[[nodiscard]] std::string_view to_string(SeriesRole role);

struct RenderOptions {
    Format format = Format::markdown;
    double bold_threshold = 50.0;        // markdown only; strict inequality
    std::map<std::string, int> decimals; // per-column overrides: pct, adj_r2, coef, p, stat
    bool include_manifest = false;       // embed the manifest (json output only)
    std::string manifest;                // manifest text to embed when requested

    /// Configured precision for a column; pct defaults to 1 decimal,
    /// everything else to 3.
    [[nodiscard]] int decimals_for(const std::string& column) const;
};

struct DescKey {
    AssetId asset;
    SeriesRole role{};
};

/// Canonical column order: bitcoin, gold, oil, then other assets by name;
/// within an asset spot price, futures price, volume, open interest.
struct DescKeyOrder {
    bool operator()(const DescKey& a, const DescKey& b) const;
};

using DescriptivesMap = std::map<DescKey, stats::DescriptiveStats, DescKeyOrder>;

/// Table of descriptive statistics, one column per (asset, role), rows
/// Mean / Median / Maximum / Minimum / Std Dev. / Skewness / Kurtosis.
/// Undefined skewness/kurtosis render as "-" (null in JSON).
[[nodiscard]] std::string render_descriptives(const DescriptivesMap& table,
                                              const RenderOptions& opts);

/// Model-comparison table: per model, percent significant and percent
/// negative-given-significant per variable, plus mean adjusted R^2.
/// Markdown bolds percentages strictly above the threshold; variables not in
/// a model stay blank; undefined negative percentages render as "-".
[[nodiscard]] std::string render_comparison(const analysis::ComparisonReport& report,
                                            const RenderOptions& opts);

/// Per-contract coefficient table for one model: coefficients with
/// significance stars, p-values in parentheses on the following line, and
/// adjusted R^2. Failed contracts render their error label.
[[nodiscard]] std::string render_contract_table(std::span<const analysis::ContractResult> results,
                                                const regress::ModelSpec& model,
                                                const RenderOptions& opts);

/// Everything needed to reproduce a run.
struct RunSettings {
    std::string command;
    std::string dependent;  // empty when not applicable
    int window_days = 42;
    double alpha = 0.10;
    measures::ScalingPolicy scaling = measures::ScalingPolicy::defaults();
    std::map<std::string, std::string> input_digests;  // path -> fnv1a64 hex
    std::optional<std::uint64_t> seed;
    std::string timestamp;  // ISO-8601 UTC; filled with the current time when empty
};

/// JSON document recording the full analysis configuration: windowing, alpha,
/// scaling policy, estimator conventions, input digests, tool version.
[[nodiscard]] std::string write_run_manifest(const RunSettings& settings);

/// FNV-1a 64-bit digest, hex-encoded; used to fingerprint input files.
[[nodiscard]] std::string fnv1a64_hex(std::string_view bytes);

}  // namespace contractlab::report
