#pragma once

#include "contractlab/dates.hpp"

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace contractlab::marketdata {

/// Asset label: "bitcoin", "gold", "oil", or any non-empty custom name.
/// The name selects the default scaling policy for activity variables.
struct AssetId {
    std::string name;

    friend bool operator==(const AssetId&, const AssetId&) = default;
    auto operator<=>(const AssetId&) const = default;
};

/// One trading day of a futures contract. Prices may be non-positive on
/// ingest (oil traded below zero in April 2020); such rows are flagged at
/// parse time and dropped later by measures that cannot handle them.
struct DailyBar {
    Date date;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;         // contracts traded
    double open_interest = 0.0;  // contracts outstanding at day end

    friend bool operator==(const DailyBar&, const DailyBar&) = default;
};

/// Delivery month identifying one contract in a chain.
struct ContractMonth {
    int year = 0;
    unsigned month = 0;

    /// "Mar-18" style label used in rendered tables.
    [[nodiscard]] std::string label() const;

    friend bool operator==(const ContractMonth&, const ContractMonth&) = default;
    auto operator<=>(const ContractMonth&) const = default;
};

struct ContractSeries {
    AssetId asset;
    ContractMonth contract;
    Date expiry;                  // last_friday(contract) unless overridden
    std::vector<DailyBar> bars;   // strictly increasing by date, none after expiry

    friend bool operator==(const ContractSeries&, const ContractSeries&) = default;
};

struct SpotPoint {
    Date date;
    double price = 0.0;  // finite; may be negative

    friend bool operator==(const SpotPoint&, const SpotPoint&) = default;
};

struct SpotSeries {
    AssetId asset;
    std::vector<SpotPoint> points;  // strictly increasing by date

    friend bool operator==(const SpotSeries&, const SpotSeries&) = default;
};

enum class RowIssue {
    bad_field,       // unparseable or out-of-range value
    missing_field,   // too few columns
    duplicate_date,  // second bar for the same (asset, contract, date)
    after_expiry,    // bar dated after the contract's expiry
    inconsistent,    // e.g. low above high, conflicting expiry override
    nonpositive_price,
};

std::string_view to_string(RowIssue issue);

/// One rejected or flagged input row. `line` is 1-based (header is line 1).
struct RowError {
    std::size_t line = 0;
    RowIssue issue{};
    std::string detail;   // offending value: field text, date, ...
    std::string message;
};

struct ContractParse {
    std::vector<ContractSeries> series;  // sorted by (asset, contract month)
    std::vector<RowError> errors;        // rejected rows
    std::vector<RowError> warnings;      // accepted but flagged rows
};

struct SpotParse {
    std::vector<SpotSeries> series;  // one per asset, sorted by asset
    std::vector<RowError> errors;
};

/// Expected CSV headers (External Interfaces). The expiry_override column is
/// optional and usually empty; a non-empty value replaces the last-Friday rule
/// for that contract (exchange holiday adjustments).
inline constexpr std::string_view kContractCsvHeader =
    "asset,contract_year,contract_month,date,high,low,close,volume,open_interest";
inline constexpr std::string_view kContractCsvHeaderWithOverride =
    "asset,contract_year,contract_month,date,high,low,close,volume,open_interest,expiry_override";
inline constexpr std::string_view kSpotCsvHeader = "asset,date,price";

/// Parses a futures contract chain CSV. Malformed rows are collected into the
/// returned error report rather than silently skipped; a bad header throws
/// FormatError naming the expected one. Bars are sorted per contract.
[[nodiscard]] ContractParse parse_contract_csv(std::istream& in);

/// Parses a spot CSV covering one or more assets. Throws DataError if dates
/// are not strictly increasing within an asset.
[[nodiscard]] SpotParse parse_spot_csv(std::istream& in);

/// Serializations that round-trip through the parsers bit-exactly
/// (shortest round-trip float formatting).
[[nodiscard]] std::string serialize_contract_csv(std::span<const ContractSeries> series);
[[nodiscard]] std::string serialize_spot_csv(const SpotSeries& spot);

/// Throws DataError if the series violates its invariants (empty, unsorted,
/// duplicate dates, or bars after expiry).
void validate(const ContractSeries& series);

/// Trading days remaining: the number of bar dates in this series strictly
/// after `date`, up to and including expiry. Zero on the final bar. Throws
/// DomainError if `date` is after expiry or not a bar date of the series.
[[nodiscard]] int maturity_counter(const ContractSeries& series, Date date);

/// Keeps the final min(window_days, length) bars ending at the last bar on or
/// before expiry. window_days must be positive and the series non-empty.
[[nodiscard]] ContractSeries window_last_n(ContractSeries series, int window_days);

struct AlignedRow {
    DailyBar bar;
    double spot_price = 0.0;
};

struct Alignment {
    std::vector<AlignedRow> rows;
    std::size_t dropped_bars = 0;  // futures bars with no spot price that day
    std::size_t dropped_spot = 0;  // spot points inside the bar range with no bar
};

/// Inner join of contract bars with spot prices on date. Dates absent from
/// either side are dropped and counted. Throws DomainError on asset mismatch
/// and DataError when the join is empty.
[[nodiscard]] Alignment align_with_spot(const ContractSeries& series, const SpotSeries& spot);

/// Panel row: the regression's dependent value and explanatory variables for
/// one contract-day, after scaling.
struct ObservationRow {
    Date date;
    double dv = 0.0;  // dependent value, dimensionless (x dv_factor)
    int m = 0;        // maturity: trading days remaining
    double v = 0.0;   // scaled trading volume
    double o = 0.0;   // scaled open interest

    friend bool operator==(const ObservationRow&, const ObservationRow&) = default;
};

struct DropRecord {
    Date date;
    std::string reason;
};

/// Aligned, windowed, scaled observations for one contract.
struct ObservationPanel {
    AssetId asset;
    ContractMonth contract;
    std::vector<ObservationRow> rows;   // ordered by date
    std::vector<DropRecord> dropped;    // rows removed with reasons
};

}  // namespace contractlab::marketdata
