#pragma once

#include "contractlab/marketdata.hpp"

#include <map>
#include <string>
#include <string_view>

namespace contractlab::measures {

using marketdata::AssetId;
using marketdata::ContractSeries;
using marketdata::ObservationPanel;
using marketdata::SpotSeries;

/// The dependent variable of the contract-by-contract regression.
enum class DependentKind { volatility, basis };

[[nodiscard]] std::string_view to_string(DependentKind kind);
[[nodiscard]] DependentKind dependent_from_string(std::string_view name);

/// Scaling conventions applied when building panels: dv is multiplied by
/// dv_factor, volume and open interest are divided by the asset's activity
/// divisor. The defaults scale dv by 10,000 for every asset and measure
/// activity in units of 10,000 contracts for gold and oil only.
struct ScalingPolicy {
    double dv_factor = 10000.0;
    double default_activity_divisor = 1.0;
    std::map<std::string, double> activity_divisor_overrides;  // keyed by asset name

    [[nodiscard]] double activity_divisor(const AssetId& asset) const;

    [[nodiscard]] static ScalingPolicy defaults();

    /// Throws DomainError unless dv_factor and every divisor are positive.
    void validate() const;
};

/// Daily range variance proxy (ln H - ln L)^2 / (4 ln 2). Requires
/// high >= low > 0; scale-invariant; zero only on a zero-range day.
[[nodiscard]] double parkinson_volatility(double high, double low);

/// Spot-futures gap as a percentage of the futures price,
/// (spot - futures) / futures * 100. Requires futures != 0; a negative spot
/// (oil, April 2020) is fine.
[[nodiscard]] double basis_pct(double spot, double futures);

/// Builds the windowed, scaled observation panel for one contract.
///
/// The series is validated, joined with spot closes for the basis measure,
/// cut to the final `window_days` observations, and each row is scaled per
/// `policy`. Rows whose bars violate a measure's domain (non-positive high
/// or low under the volatility measure, zero futures close under the basis
/// measure) are dropped and recorded with reasons. Throws DataError when no
/// rows survive.
[[nodiscard]] ObservationPanel build_panel(const ContractSeries& series, const SpotSeries& spot,
                                           DependentKind kind, const ScalingPolicy& policy,
                                           int window_days);

/// Volatility-only overload; the basis measure needs a spot series.
[[nodiscard]] ObservationPanel build_panel(const ContractSeries& series, DependentKind kind,
                                           const ScalingPolicy& policy, int window_days);

}  // namespace contractlab::measures
