#include "contractlab/synth.hpp"

#include "contractlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace contractlab::synth {

namespace {

constexpr double kTradingDaysPerYear = 252.0;

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

Date first_weekday_of(int year, unsigned month) {
    Date d(year, month, 1);
    while (!d.is_weekday()) {
        d = d + 1;
    }
    return d;
}

/// The `count` weekdays ending at `end` (inclusive), ascending.
std::vector<Date> weekdays_ending_at(Date end, int count) {
    std::vector<Date> days(static_cast<std::size_t>(count));
    Date d = end;
    for (int i = count; i-- > 0;) {
        while (!d.is_weekday()) {
            d = d - 1;
        }
        days[static_cast<std::size_t>(i)] = d;
        d = d - 1;
    }
    return days;
}

marketdata::ContractMonth month_offset(int start_year, unsigned start_month, int offset) {
    const int flat = start_year * 12 + static_cast<int>(start_month) - 1 + offset;
    return marketdata::ContractMonth{flat / 12, static_cast<unsigned>(flat % 12) + 1};
}

}  // namespace

using marketdata::ContractMonth;
using marketdata::DailyBar;
using marketdata::SpotPoint;

Rng::Rng(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& word : state_) {
        word = splitmix64(x);
    }
    if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0) {
        state_[0] = 0x9E3779B97F4A7C15ull;  // xoshiro state must not be all zero
    }
}

std::uint64_t Rng::next() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

void SynthConfig::validate() const {
    if (asset.name.empty()) {
        throw DomainError("synth config: asset name must not be empty");
    }
    if (n_contracts < 1) {
        throw DomainError("synth config: n_contracts must be at least 1");
    }
    if (window_days < 4) {
        throw DomainError("synth config: window_days must be at least 4");
    }
    if (start_month < 1 || start_month > 12) {
        throw DomainError("synth config: start_month must be in 1..12");
    }
    if (!(spot0 > 0.0)) {
        throw DomainError("synth config: spot0 must be positive");
    }
    if (vol < 0.0) {
        throw DomainError("synth config: vol must be non-negative");
    }
    if (noise_sigma < 0.0) {
        throw DomainError("synth config: noise_sigma must be non-negative");
    }
    if (oi_peak < 0.0 || volume_mean <= 0.0) {
        throw DomainError("synth config: oi_peak must be >= 0 and volume_mean > 0");
    }
}

SpotSeries gbm_spot(const SynthConfig& config, int n_days) {
    config.validate();
    if (n_days < 1) {
        throw DomainError("gbm_spot: n_days must be at least 1");
    }
    std::vector<Date> dates;
    dates.reserve(static_cast<std::size_t>(n_days));
    Date d = first_weekday_of(config.start_year, config.start_month);
    for (int i = 0; i < n_days; ++i) {
        while (!d.is_weekday()) {
            d = d + 1;
        }
        dates.push_back(d);
        d = d + 1;
    }

    Rng rng(config.seed);
    const double dt = 1.0 / kTradingDaysPerYear;
    const double increment_mean = (config.drift - 0.5 * config.vol * config.vol) * dt;
    const double increment_sd = config.vol * std::sqrt(dt);

    SpotSeries spot;
    spot.asset = config.asset;
    spot.points.reserve(dates.size());
    double price = config.spot0;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (i > 0) {
            price *= std::exp(increment_mean + increment_sd * rng.normal());
        }
        spot.points.push_back(SpotPoint{dates[i], price});
    }
    return spot;
}

double carry_futures(double spot, double risk_free, double storage_cost,
                     double convenience_yield, double years_to_maturity) {
    if (!(spot > 0.0)) {
        throw DomainError("carry_futures: spot must be positive");
    }
    if (years_to_maturity < 0.0) {
        throw DomainError("carry_futures: time to maturity must be non-negative");
    }
    return spot * std::exp((risk_free + storage_cost - convenience_yield) * years_to_maturity);
}

double oi_profile(int m, int life, double peak) {
    if (m < 0 || life < 0 || m > life) {
        throw DomainError("oi_profile: need 0 <= m <= life");
    }
    if (peak < 0.0) {
        throw DomainError("oi_profile: peak must be non-negative");
    }
    if (life == 0) {
        return 0.0;
    }
    const double md = static_cast<double>(m);
    const double ld = static_cast<double>(life);
    return std::round(peak * 4.0 * md * (ld - md) / (ld * ld));
}

SynthMarket generate_market(const SynthConfig& config) {
    config.validate();

    // Per-contract calendars: window_days weekdays ending on each last-Friday
    // expiry. The synthetic contract's lifetime equals its observation window.
    std::vector<ContractMonth> months(static_cast<std::size_t>(config.n_contracts));
    std::vector<Date> expiries(months.size());
    std::vector<std::vector<Date>> calendars(months.size());
    for (int c = 0; c < config.n_contracts; ++c) {
        const auto idx = static_cast<std::size_t>(c);
        months[idx] = month_offset(config.start_year, config.start_month, c);
        expiries[idx] = last_friday(months[idx].year, months[idx].month);
        calendars[idx] = weekdays_ending_at(expiries[idx], config.window_days);
    }

    // One continuous spot path covering every contract date. gbm_spot starts
    // at the first weekday of its start month, so count the span from there.
    const Date spot_start = calendars.front().front();
    const Date spot_end = expiries.back();
    SynthConfig spot_config = config;
    spot_config.start_year = spot_start.year();
    spot_config.start_month = spot_start.month();
    const Date path_start = first_weekday_of(spot_start.year(), spot_start.month());
    int span_days = 0;
    for (Date d = path_start; d <= spot_end; d = d + 1) {
        if (d.is_weekday()) {
            ++span_days;
        }
    }
    SpotSeries spot = gbm_spot(spot_config, span_days);

    const auto spot_at = [&spot](Date date) {
        const auto it = std::lower_bound(spot.points.begin(), spot.points.end(), date,
                                         [](const SpotPoint& p, Date d) { return p.date < d; });
        return it->price;  // every contract date is a weekday inside the path
    };

    const auto policy = measures::ScalingPolicy::defaults();
    const double divisor = policy.activity_divisor(config.asset);
    const int life = config.window_days - 1;

    SynthMarket market;
    market.spot = spot;
    market.truth.true_beta = config.dgp_beta;
    market.contracts.reserve(months.size());

    for (std::size_t c = 0; c < months.size(); ++c) {
        Rng rng(config.seed ^ static_cast<std::uint64_t>(c + 1));
        ContractSeries series;
        series.asset = config.asset;
        series.contract = months[c];
        series.expiry = expiries[c];
        series.bars.reserve(calendars[c].size());

        for (std::size_t i = 0; i < calendars[c].size(); ++i) {
            const Date date = calendars[c][i];
            const int m = life - static_cast<int>(i);
            const double years = static_cast<double>(m) / kTradingDaysPerYear;
            const double close = carry_futures(spot_at(date), config.risk_free,
                                               config.storage_cost, config.convenience_yield,
                                               years);
            const double volume =
                std::max(1.0, std::round(config.volume_mean * (0.5 + rng.uniform())));
            const double open_interest = oi_profile(m, life, config.oi_peak);
            const double noise = config.noise_sigma > 0.0 ? config.noise_sigma * rng.normal() : 0.0;

            const double dv = config.dgp_beta[0] + config.dgp_beta[1] * m +
                              config.dgp_beta[2] * (volume / divisor) +
                              config.dgp_beta[3] * (open_interest / divisor) + noise;
            if (!(dv > 0.0)) {
                throw DataError("generate_market: planted dv <= 0 for " + series.contract.label() +
                                " on " + date.iso() +
                                "; increase dgp_beta[0] or reduce noise_sigma");
            }
            // Invert the range estimator: a symmetric log-space bracket around
            // the close with (ln H - ln L)^2 / (4 ln 2) equal to the planted value.
            const double spread = std::sqrt(4.0 * std::numbers::ln2 * dv / policy.dv_factor);
            const double high = close * std::exp(0.5 * spread);
            const double low = close * std::exp(-0.5 * spread);

            series.bars.push_back(DailyBar{date, high, low, close, volume, open_interest});
        }
        market.contracts.push_back(std::move(series));
    }

    market.truth.panels.reserve(market.contracts.size());
    for (const auto& series : market.contracts) {
        market.truth.panels.push_back(measures::build_panel(
            series, measures::DependentKind::volatility, policy, config.window_days));
    }
    return market;
}

}  // namespace contractlab::synth
