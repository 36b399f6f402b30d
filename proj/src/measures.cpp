#include "contractlab/measures.hpp"

#include "contractlab/errors.hpp"

#include <cmath>
#include <numbers>

namespace contractlab::measures {

namespace {

constexpr double kFourLn2 = 4.0 * std::numbers::ln2;

struct RawRow {
    marketdata::DailyBar bar;
    double spot_price = 0.0;  // only meaningful for the basis measure
};

}  // namespace

std::string_view to_string(DependentKind kind) {
    return kind == DependentKind::volatility ? "volatility" : "basis";
}

DependentKind dependent_from_string(std::string_view name) {
    if (name == "volatility") {
        return DependentKind::volatility;
    }
    if (name == "basis") {
        return DependentKind::basis;
    }
    throw DomainError("unknown dependent kind '" + std::string(name) +
                      "' (expected volatility or basis)");
}

double ScalingPolicy::activity_divisor(const AssetId& asset) const {
    const auto it = activity_divisor_overrides.find(asset.name);
    return it == activity_divisor_overrides.end() ? default_activity_divisor : it->second;
}

ScalingPolicy ScalingPolicy::defaults() {
    ScalingPolicy policy;
    policy.activity_divisor_overrides = {{"gold", 10000.0}, {"oil", 10000.0}};
    return policy;
}

void ScalingPolicy::validate() const {
    if (!(dv_factor > 0.0) || !std::isfinite(dv_factor)) {
        throw DomainError("scaling policy: dv_factor must be positive");
    }
    if (!(default_activity_divisor > 0.0) || !std::isfinite(default_activity_divisor)) {
        throw DomainError("scaling policy: activity divisor must be positive");
    }
    for (const auto& [asset, divisor] : activity_divisor_overrides) {
        if (!(divisor > 0.0) || !std::isfinite(divisor)) {
            throw DomainError("scaling policy: activity divisor for '" + asset + "' must be positive");
        }
    }
}

double parkinson_volatility(double high, double low) {
    if (!(high > 0.0) || !(low > 0.0)) {
        throw DomainError("parkinson_volatility: prices must be positive");
    }
    if (high < low) {
        throw DomainError("parkinson_volatility: high below low");
    }
    const double range = std::log(high) - std::log(low);
    return range * range / kFourLn2;
}

double basis_pct(double spot, double futures) {
    if (futures == 0.0 || !std::isfinite(futures) || !std::isfinite(spot)) {
        throw DomainError("basis_pct: futures price must be finite and non-zero");
    }
    return (spot - futures) / futures * 100.0;
}

static ObservationPanel build_panel_impl(const ContractSeries& series, const SpotSeries* spot,
                                         DependentKind kind, const ScalingPolicy& policy,
                                         int window_days) {
    marketdata::validate(series);
    policy.validate();
    if (window_days <= 0) {
        throw DomainError("build_panel: window_days must be positive");
    }
    if (kind == DependentKind::basis && spot == nullptr) {
        throw DomainError("build_panel: basis measure requires a spot series");
    }

    // Join (basis only), then keep the final window_days observations.
    std::vector<RawRow> raw;
    if (kind == DependentKind::basis) {
        auto aligned = marketdata::align_with_spot(series, *spot);
        raw.reserve(aligned.rows.size());
        for (const auto& row : aligned.rows) {
            raw.push_back(RawRow{row.bar, row.spot_price});
        }
    } else {
        raw.reserve(series.bars.size());
        for (const auto& bar : series.bars) {
            raw.push_back(RawRow{bar, 0.0});
        }
    }
    if (raw.size() > static_cast<std::size_t>(window_days)) {
        raw.erase(raw.begin(), raw.end() - window_days);
    }

    const double divisor = policy.activity_divisor(series.asset);

    ObservationPanel panel;
    panel.asset = series.asset;
    panel.contract = series.contract;
    panel.rows.reserve(raw.size());

    for (const auto& row : raw) {
        double dv_raw = 0.0;
        if (kind == DependentKind::volatility) {
            if (!(row.bar.high > 0.0) || !(row.bar.low > 0.0)) {
                panel.dropped.push_back({row.bar.date, "non-positive price"});
                continue;
            }
            if (row.bar.high < row.bar.low) {
                panel.dropped.push_back({row.bar.date, "high below low"});
                continue;
            }
            dv_raw = parkinson_volatility(row.bar.high, row.bar.low);
        } else {
            if (row.bar.close == 0.0) {
                panel.dropped.push_back({row.bar.date, "zero futures price"});
                continue;
            }
            dv_raw = basis_pct(row.spot_price, row.bar.close);
        }
        marketdata::ObservationRow obs;
        obs.date = row.bar.date;
        obs.dv = dv_raw * policy.dv_factor;
        obs.m = marketdata::maturity_counter(series, row.bar.date);
        obs.v = row.bar.volume / divisor;
        obs.o = row.bar.open_interest / divisor;
        panel.rows.push_back(obs);
    }

    if (panel.rows.empty()) {
        throw DataError("build_panel: no usable observations for " + series.contract.label() +
                        " (" + std::to_string(panel.dropped.size()) + " rows dropped)");
    }
    return panel;
}

ObservationPanel build_panel(const ContractSeries& series, const SpotSeries& spot,
                             DependentKind kind, const ScalingPolicy& policy, int window_days) {
    return build_panel_impl(series, &spot, kind, policy, window_days);
}

ObservationPanel build_panel(const ContractSeries& series, DependentKind kind,
                             const ScalingPolicy& policy, int window_days) {
    if (kind == DependentKind::basis) {
        throw DomainError("build_panel: basis measure requires a spot series");
    }
    return build_panel_impl(series, nullptr, kind, policy, window_days);
}

}  // namespace contractlab::measures
