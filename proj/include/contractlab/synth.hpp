#pragma once

#include "contractlab/marketdata.hpp"
#include "contractlab/measures.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace contractlab::synth {

using marketdata::AssetId;
using marketdata::ContractSeries;
using marketdata::ObservationPanel;
using marketdata::SpotSeries;

/// Deterministic xoshiro256++ stream with SplitMix64 state expansion and
/// Box-Muller normals. The algorithm is pinned (not a platform default) so
/// fixtures reproduce bit-for-bit everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept;

    std::uint64_t next() noexcept;

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() noexcept;

    /// Standard normal draw.
    double normal() noexcept;

private:
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Parameters of the synthetic futures market. Rates are per year; the
/// planted coefficients apply to the scaled panel variables under the
/// default scaling policy for `asset`.
struct SynthConfig {
    std::uint64_t seed = 1;
    int n_contracts = 47;
    int window_days = 42;   // bars generated per contract
    int start_year = 2018;
    unsigned start_month = 1;
    AssetId asset{"synthetic"};
    double spot0 = 10000.0;
    double drift = 0.05;
    double vol = 0.50;
    double risk_free = 0.02;
    double storage_cost = 0.0;
    double convenience_yield = 0.0;
    double oi_peak = 2000.0;
    double volume_mean = 3000.0;
    std::array<double, 4> dgp_beta{5.0, 0.3, 0.02, -0.01};  // b0, b_m, b_v, b_o
    double noise_sigma = 0.0;

    void validate() const;
};

/// Ground truth recorded alongside generated data: the planted coefficients
/// and the volatility panels rebuilt from the raw series.
struct SynthTruth {
    std::array<double, 4> true_beta{};
    std::vector<ObservationPanel> panels;
};

struct SynthMarket {
    std::vector<ContractSeries> contracts;
    SpotSeries spot;
    SynthTruth truth;
};

/// Geometric Brownian motion spot path over n_days weekdays starting at the
/// first weekday of the configured start month. Log-increments are
/// Normal(drift*dt - vol^2*dt/2, vol^2*dt) with dt = 1/252.
[[nodiscard]] SpotSeries gbm_spot(const SynthConfig& config, int n_days);

/// Cost-of-carry futures price S * exp((r + u - y) * T); equals the spot at
/// T = 0, so the basis vanishes at expiry.
[[nodiscard]] double carry_futures(double spot, double risk_free, double storage_cost,
                                   double convenience_yield, double years_to_maturity);

/// Open-interest lifecycle: a downward parabola in time-to-maturity that is
/// zero at listing (m = life) and at expiry (m = 0) and peaks at midlife.
/// Rounded to a whole number of contracts.
[[nodiscard]] double oi_profile(int m, int life, double peak);

/// Generates a full synthetic market: one GBM spot path, n_contracts monthly
/// contracts expiring on last Fridays, carry-priced closes, high/low chosen
/// so the volatility panel reproduces the planted linear signal
/// b0 + b1*m + b2*v + b3*o plus Normal(0, noise_sigma^2) noise.
/// Throws DataError if a planted dv is non-positive (no representable
/// high/low spread; raise dgp_beta[0]).
[[nodiscard]] SynthMarket generate_market(const SynthConfig& config);

}  // namespace contractlab::synth
