#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rollcast/datetime.hpp"
#include "rollcast/lag_polynomial.hpp"
#include "rollcast/random.hpp"
#include "rollcast/sarimax.hpp"
#include "rollcast/series.hpp"

namespace rollcast {

/// Recipe for a synthetic traffic series: a seasonal ARMA core simulated by
/// direct recursion (with burn-in), optionally integrated, plus a base level,
/// an optional daily sinusoid, and an optional multiplicative level shift —
/// enough structure to exercise every model without real telemetry.
struct SynthSpec {
    std::size_t n = 2880;
    UnixSeconds start = 1704067200;  // 2024-01-01T00:00:00Z
    std::int64_t interval_seconds = 300;
    std::vector<double> phi;
    std::vector<double> theta;
    std::vector<double> seasonal_phi;
    std::vector<double> seasonal_theta;
    int season_length = 0;
    int d = 0;
    int D = 0;
    double sigma = 1.0;
    double base_level = 10.0;
    double daily_amplitude = 0.0;
    double level_shift_factor = 1.0;   // values from level_shift_index on are multiplied by this
    std::size_t level_shift_index = 0;
    std::size_t burn_in = 500;
};

inline TimeSeries synthesize(const SynthSpec& spec, std::uint64_t seed) {
    if (spec.n == 0) throw std::invalid_argument("synthesize: n must be positive");
    if (spec.interval_seconds <= 0) {
        throw std::invalid_argument("synthesize: interval must be positive");
    }
    if (!(spec.sigma >= 0.0)) throw std::invalid_argument("synthesize: sigma must be nonnegative");
    if (spec.d < 0 || spec.D < 0) throw std::invalid_argument("synthesize: negative differencing");
    if ((spec.D > 0 || !spec.seasonal_phi.empty() || !spec.seasonal_theta.empty()) &&
        spec.season_length < 2) {
        throw std::invalid_argument("synthesize: seasonal structure needs a period of at least 2");
    }
    if (!(spec.level_shift_factor > 0.0)) {
        throw std::invalid_argument("synthesize: level shift factor must be positive");
    }

    const LagPolynomial ar_full = expand_polynomials(
        {spec.phi, LagKind::ar}, {spec.seasonal_phi, LagKind::ar}, spec.season_length);
    const LagPolynomial ma_full = expand_polynomials(
        {spec.theta, LagKind::ma}, {spec.seasonal_theta, LagKind::ma}, spec.season_length);
    if (!polynomial_is_stable(ar_full)) {
        throw std::invalid_argument("synthesize: autoregressive polynomial is not stationary");
    }

    const std::vector<double>& arc = ar_full.coefficients;
    const std::vector<double>& mac = ma_full.coefficients;
    const std::size_t total = spec.burn_in + spec.n;
    NormalSampler sampler(seed);
    std::vector<double> shocks(total), core(total);
    for (std::size_t t = 0; t < total; ++t) shocks[t] = spec.sigma * sampler.normal();
    for (std::size_t t = 0; t < total; ++t) {
        double value = shocks[t];
        for (std::size_t i = 0; i < arc.size() && i < t; ++i) value += arc[i] * core[t - 1 - i];
        for (std::size_t j = 0; j < mac.size() && j < t; ++j) value += mac[j] * shocks[t - 1 - j];
        core[t] = value;
    }
    std::vector<double> sim(core.end() - static_cast<std::ptrdiff_t>(spec.n), core.end());

    if (spec.d > 0 || spec.D > 0) {
        const std::size_t span = static_cast<std::size_t>(spec.d) +
                                 static_cast<std::size_t>(spec.D) *
                                     static_cast<std::size_t>(spec.season_length);
        sim = integrate(sim, std::vector<double>(span, 0.0), spec.d, spec.D, spec.season_length);
    }

    TimeSeries out;
    out.start = spec.start;
    out.interval_seconds = spec.interval_seconds;
    out.values.resize(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        double v = spec.base_level + sim[i];
        if (spec.daily_amplitude != 0.0) {
            const UnixSeconds ts = out.start + static_cast<std::int64_t>(i) * out.interval_seconds;
            const double phase = 2.0 * M_PI * static_cast<double>(second_of_day(ts)) / 86400.0;
            v += spec.daily_amplitude * std::sin(phase);
        }
        if (spec.level_shift_factor != 1.0 && i >= spec.level_shift_index) {
            v *= spec.level_shift_factor;
        }
        out.values[i] = v;
    }
    return out;
}

}  // namespace rollcast
