#include "contractlab/marketdata.hpp"

#include "contractlab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

namespace contractlab::marketdata {

namespace {

constexpr const char* kMonthAbbrev[12] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

RowError make_row_error(std::size_t line, RowIssue issue, std::string detail, std::string message) {
    return RowError{line, issue, std::move(detail), std::move(message)};
}

struct PendingBar {
    DailyBar bar;
    std::size_t line = 0;
};

struct ContractBuilder {
    std::vector<PendingBar> bars;
    std::optional<Date> expiry_override;
};

}  // namespace

std::string_view to_string(RowIssue issue) {
    switch (issue) {
        case RowIssue::bad_field: return "bad field";
        case RowIssue::missing_field: return "missing field";
        case RowIssue::duplicate_date: return "duplicate date";
        case RowIssue::after_expiry: return "bar after expiry";
        case RowIssue::inconsistent: return "inconsistent row";
        case RowIssue::nonpositive_price: return "non-positive price";
    }
    return "unknown";
}

std::string ContractMonth::label() const {
    char buf[16];
    const unsigned idx = (month >= 1 && month <= 12) ? month - 1 : 0;
    std::snprintf(buf, sizeof(buf), "%s-%02d", kMonthAbbrev[idx], year % 100);
    return buf;
}

ContractParse parse_contract_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("empty input: expected header '" + std::string(kContractCsvHeader) + "'");
    }
    const std::string_view header = trim(line);
    bool has_override = false;
    if (header == kContractCsvHeaderWithOverride) {
        has_override = true;
    } else if (header != kContractCsvHeader) {
        throw FormatError("header mismatch: expected '" + std::string(kContractCsvHeader) +
                          "[,expiry_override]', got '" + std::string(header) + "'");
    }
    const std::size_t n_fields = has_override ? 10 : 9;

    ContractParse out;
    std::map<std::pair<std::string, ContractMonth>, ContractBuilder> builders;

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view row = trim(line);
        if (row.empty()) {
            continue;
        }
        const auto fields = split_fields(row);
        if (fields.size() != n_fields) {
            out.errors.push_back(make_row_error(
                lineno, RowIssue::missing_field, std::string(row),
                "expected " + std::to_string(n_fields) + " fields, got " + std::to_string(fields.size())));
            continue;
        }

        const std::string asset(fields[0]);
        if (asset.empty()) {
            out.errors.push_back(make_row_error(lineno, RowIssue::bad_field, "asset", "empty asset name"));
            continue;
        }

        int year = 0, month = 0;
        if (!parse_int(fields[1], year)) {
            out.errors.push_back(make_row_error(lineno, RowIssue::bad_field, std::string(fields[1]),
                                                "unparseable contract_year"));
            continue;
        }
        if (!parse_int(fields[2], month) || month < 1 || month > 12) {
            out.errors.push_back(make_row_error(lineno, RowIssue::bad_field, std::string(fields[2]),
                                                "contract_month must be an integer in 1..12"));
            continue;
        }

        Date date;
        try {
            date = Date::parse(fields[3]);
        } catch (const FormatError& e) {
            out.errors.push_back(make_row_error(lineno, RowIssue::bad_field, std::string(fields[3]), e.what()));
            continue;
        }

        double num[5];
        static constexpr const char* kNumName[5] = {"high", "low", "close", "volume", "open_interest"};
        bool ok = true;
        for (int i = 0; i < 5; ++i) {
            if (!parse_double(fields[4 + i], num[i])) {
                out.errors.push_back(make_row_error(
                    lineno, RowIssue::bad_field, std::string(fields[4 + i]),
                    std::string("unparseable numeric field '") + kNumName[i] + "' at line " +
                        std::to_string(lineno)));
                ok = false;
                break;
            }
        }
        if (!ok) {
            continue;
        }
        if (num[3] < 0.0 || num[4] < 0.0) {
            out.errors.push_back(make_row_error(lineno, RowIssue::bad_field,
                                                num[3] < 0.0 ? "volume" : "open_interest",
                                                "volume and open_interest must be non-negative"));
            continue;
        }
        if (num[0] > 0.0 && num[1] > 0.0 && num[1] > num[0]) {
            out.errors.push_back(make_row_error(lineno, RowIssue::inconsistent, date.iso(),
                                                "low above high"));
            continue;
        }

        std::optional<Date> override_date;
        if (has_override && !fields[9].empty()) {
            try {
                override_date = Date::parse(fields[9]);
            } catch (const FormatError& e) {
                out.errors.push_back(make_row_error(lineno, RowIssue::bad_field, std::string(fields[9]), e.what()));
                continue;
            }
        }

        const ContractMonth cm{year, static_cast<unsigned>(month)};
        auto& builder = builders[{asset, cm}];

        const bool duplicate = std::any_of(builder.bars.begin(), builder.bars.end(),
                                           [&](const PendingBar& p) { return p.bar.date == date; });
        if (duplicate) {
            out.errors.push_back(make_row_error(lineno, RowIssue::duplicate_date, date.iso(),
                                                "duplicate bar for " + asset + " " + cm.label() +
                                                    " on " + date.iso()));
            continue;
        }

        if (override_date) {
            if (builder.expiry_override && *builder.expiry_override != *override_date) {
                out.errors.push_back(make_row_error(lineno, RowIssue::inconsistent, override_date->iso(),
                                                    "conflicting expiry_override for " + asset + " " + cm.label()));
                continue;
            }
            builder.expiry_override = override_date;
        }

        if (num[0] <= 0.0 || num[1] <= 0.0 || num[2] <= 0.0) {
            out.warnings.push_back(make_row_error(lineno, RowIssue::nonpositive_price, date.iso(),
                                                  "non-positive price on " + date.iso()));
        }

        builder.bars.push_back(PendingBar{DailyBar{date, num[0], num[1], num[2], num[3], num[4]}, lineno});
    }

    for (auto& [key, builder] : builders) {
        ContractSeries series;
        series.asset = AssetId{key.first};
        series.contract = key.second;
        series.expiry = builder.expiry_override
                            ? *builder.expiry_override
                            : last_friday(key.second.year, key.second.month);
        std::sort(builder.bars.begin(), builder.bars.end(),
                  [](const PendingBar& a, const PendingBar& b) { return a.bar.date < b.bar.date; });
        series.bars.reserve(builder.bars.size());
        for (const auto& pending : builder.bars) {
            if (pending.bar.date > series.expiry) {
                out.errors.push_back(make_row_error(pending.line, RowIssue::after_expiry,
                                                    pending.bar.date.iso(),
                                                    "bar dated after expiry " + series.expiry.iso()));
                continue;
            }
            series.bars.push_back(pending.bar);
        }
        if (!series.bars.empty()) {
            out.series.push_back(std::move(series));
        }
    }
    return out;
}

SpotParse parse_spot_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("empty input: expected header '" + std::string(kSpotCsvHeader) + "'");
    }
    if (trim(line) != kSpotCsvHeader) {
        throw FormatError("header mismatch: expected '" + std::string(kSpotCsvHeader) + "', got '" +
                          std::string(trim(line)) + "'");
    }

    SpotParse out;
    std::map<std::string, SpotSeries> by_asset;

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view row = trim(line);
        if (row.empty()) {
            continue;
        }
        const auto fields = split_fields(row);
        if (fields.size() != 3) {
            out.errors.push_back(make_row_error(lineno, RowIssue::missing_field, std::string(row),
                                                "expected 3 fields, got " + std::to_string(fields.size())));
            continue;
        }
        const std::string asset(fields[0]);
        if (asset.empty()) {
            out.errors.push_back(make_row_error(lineno, RowIssue::bad_field, "asset", "empty asset name"));
            continue;
        }
        Date date;
        try {
            date = Date::parse(fields[1]);
        } catch (const FormatError& e) {
            out.errors.push_back(make_row_error(lineno, RowIssue::bad_field, std::string(fields[1]), e.what()));
            continue;
        }
        double price = 0.0;
        if (fields[2].empty()) {
            out.errors.push_back(make_row_error(lineno, RowIssue::missing_field, "price",
                                                "missing price at line " + std::to_string(lineno)));
            continue;
        }
        if (!parse_double(fields[2], price)) {
            out.errors.push_back(make_row_error(lineno, RowIssue::bad_field, std::string(fields[2]),
                                                "unparseable price at line " + std::to_string(lineno)));
            continue;
        }

        auto& series = by_asset[asset];
        if (series.points.empty()) {
            series.asset = AssetId{asset};
        } else if (date <= series.points.back().date) {
            throw DataError("spot dates for '" + asset + "' not strictly increasing at line " +
                            std::to_string(lineno) + " (" + date.iso() + " after " +
                            series.points.back().date.iso() + ")");
        }
        series.points.push_back(SpotPoint{date, price});
    }

    out.series.reserve(by_asset.size());
    for (auto& [name, series] : by_asset) {
        out.series.push_back(std::move(series));
    }
    return out;
}

std::string serialize_contract_csv(std::span<const ContractSeries> series) {
    std::string out{kContractCsvHeaderWithOverride};
    out += '\n';
    for (const auto& s : series) {
        const bool overridden = s.expiry != last_friday(s.contract.year, s.contract.month);
        bool first = true;
        for (const auto& bar : s.bars) {
            out += s.asset.name;
            out += ',';
            out += std::to_string(s.contract.year);
            out += ',';
            out += std::to_string(s.contract.month);
            out += ',';
            out += bar.date.iso();
            out += ',';
            out += fmt_double(bar.high);
            out += ',';
            out += fmt_double(bar.low);
            out += ',';
            out += fmt_double(bar.close);
            out += ',';
            out += fmt_double(bar.volume);
            out += ',';
            out += fmt_double(bar.open_interest);
            out += ',';
            if (first && overridden) {
                out += s.expiry.iso();
            }
            out += '\n';
            first = false;
        }
    }
    return out;
}

std::string serialize_spot_csv(const SpotSeries& spot) {
    std::string out{kSpotCsvHeader};
    out += '\n';
    for (const auto& point : spot.points) {
        out += spot.asset.name;
        out += ',';
        out += point.date.iso();
        out += ',';
        out += fmt_double(point.price);
        out += '\n';
    }
    return out;
}

void validate(const ContractSeries& series) {
    if (series.asset.name.empty()) {
        throw DataError("contract series has empty asset name");
    }
    if (series.bars.empty()) {
        throw DataError("contract series " + series.contract.label() + " has no bars");
    }
    for (std::size_t i = 1; i < series.bars.size(); ++i) {
        if (!(series.bars[i - 1].date < series.bars[i].date)) {
            throw DataError("bars for " + series.contract.label() +
                            " not strictly increasing at " + series.bars[i].date.iso());
        }
    }
    if (series.bars.back().date > series.expiry) {
        throw DataError("bar dated after expiry " + series.expiry.iso() + " in " +
                        series.contract.label());
    }
}

int maturity_counter(const ContractSeries& series, Date date) {
    if (date > series.expiry) {
        throw DomainError("maturity_counter: " + date.iso() + " is after expiry " +
                          series.expiry.iso());
    }
    const auto it = std::lower_bound(series.bars.begin(), series.bars.end(), date,
                                     [](const DailyBar& bar, Date d) { return bar.date < d; });
    if (it == series.bars.end() || it->date != date) {
        throw DomainError("maturity_counter: " + date.iso() + " is not a bar date of " +
                          series.contract.label());
    }
    return static_cast<int>(std::count_if(it + 1, series.bars.end(), [&](const DailyBar& bar) {
        return bar.date <= series.expiry;
    }));
}

ContractSeries window_last_n(ContractSeries series, int window_days) {
    if (window_days <= 0) {
        throw DomainError("window_last_n: window_days must be positive");
    }
    if (series.bars.empty()) {
        throw DomainError("window_last_n: empty series");
    }
    auto end = std::upper_bound(series.bars.begin(), series.bars.end(), series.expiry,
                                [](Date d, const DailyBar& bar) { return d < bar.date; });
    if (end == series.bars.begin()) {
        throw DataError("window_last_n: no bars on or before expiry " + series.expiry.iso());
    }
    const auto len = static_cast<std::size_t>(end - series.bars.begin());
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(window_days), len);
    series.bars.assign(end - static_cast<std::ptrdiff_t>(keep), end);
    return series;
}

Alignment align_with_spot(const ContractSeries& series, const SpotSeries& spot) {
    if (series.asset != spot.asset) {
        throw DomainError("align_with_spot: asset mismatch ('" + series.asset.name + "' vs '" +
                          spot.asset.name + "')");
    }
    Alignment out;
    auto sp = spot.points.begin();
    for (const auto& bar : series.bars) {
        while (sp != spot.points.end() && sp->date < bar.date) {
            ++sp;
        }
        if (sp != spot.points.end() && sp->date == bar.date) {
            out.rows.push_back(AlignedRow{bar, sp->price});
            ++sp;
        } else {
            ++out.dropped_bars;
        }
    }
    if (out.rows.empty()) {
        throw DataError("align_with_spot: no overlapping dates between " + series.contract.label() +
                        " and spot series");
    }
    const Date lo = series.bars.front().date;
    const Date hi = series.bars.back().date;
    const auto in_range = std::count_if(spot.points.begin(), spot.points.end(),
                                        [&](const SpotPoint& p) { return p.date >= lo && p.date <= hi; });
    out.dropped_spot = static_cast<std::size_t>(in_range) - out.rows.size();
    return out;
}

}  // namespace contractlab::marketdata
