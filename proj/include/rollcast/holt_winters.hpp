#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rollcast/nelder_mead.hpp"
#include "rollcast/series.hpp"

namespace rollcast {

/// Smoothing constants for additive triple exponential smoothing, plus the
/// seasonal period they operate at.
struct HwParams {
    double alpha = 0.5;
    double beta = 0.5;
    double gamma = 0.5;
    int m = 288;
};

inline void validate_hw_params(const HwParams& params) {
    auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (!in_unit(params.alpha) || !in_unit(params.beta) || !in_unit(params.gamma)) {
        throw std::invalid_argument("holt-winters: smoothing constants must lie in [0, 1]");
    }
    if (params.m < 2) {
        throw std::invalid_argument("holt-winters: seasonal period must be at least 2");
    }
}

/// Smoothing state: level, trend, and the seasonal ring holding the last m
/// seasonal values oldest first (s_{t-m+1} .. s_t).
struct HwState {
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> seasonals;
    std::int64_t t = 0;
};

/// Builds a starting state from the first two seasons: the level is the first
/// season's mean, the trend the per-step change between the two season means,
/// and the seasonals the first season's deviations from its mean (re-centered
/// so they sum to zero despite rounding). The resulting ring is phase-aligned
/// with the start of the series, so smoothing may consume it from index 0.
inline HwState initialize(const std::vector<double>& values, int season_length) {
    if (season_length < 2) {
        throw std::invalid_argument("initialize: seasonal period must be at least 2");
    }
    const std::size_t m = static_cast<std::size_t>(season_length);
    if (values.size() < 2 * m) {
        throw std::invalid_argument("initialize: need at least two full seasons");
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("initialize: non-finite value");
    }
    double mean1 = 0.0, mean2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean1 += values[i];
    for (std::size_t i = m; i < 2 * m; ++i) mean2 += values[i];
    mean1 /= static_cast<double>(m);
    mean2 /= static_cast<double>(m);

    HwState state;
    state.level = mean1;
    state.trend = (mean2 - mean1) / static_cast<double>(m);
    state.seasonals.resize(m);
    double dev_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        state.seasonals[i] = values[i] - mean1;
        dev_sum += state.seasonals[i];
    }
    const double recenter = dev_sum / static_cast<double>(m);
    for (double& s : state.seasonals) s -= recenter;
    state.t = 0;
    return state;
}

inline HwState initialize(const TimeSeries& series, int season_length) {
    return initialize(series.values, season_length);
}

/// One smoothing update. The level blends the deseasonalized observation with
/// the previous level-plus-trend; the trend tracks the level change; the
/// seasonal blends the detrended observation with the value one period back.
/// The trend uses the freshly updated level, while the seasonal sees only the
/// previous level and trend.
inline HwState smooth_step(const HwState& state, double y, const HwParams& params) {
    validate_hw_params(params);
    if (!std::isfinite(y)) throw std::invalid_argument("smooth_step: non-finite observation");
    if (state.seasonals.size() != static_cast<std::size_t>(params.m)) {
        throw std::invalid_argument("smooth_step: seasonal ring size does not match the period");
    }
    const double s_old = state.seasonals.front();
    HwState next;
    next.level = params.alpha * (y - s_old) + (1.0 - params.alpha) * (state.level + state.trend);
    next.trend = params.beta * (next.level - state.level) + (1.0 - params.beta) * state.trend;
    const double s_new =
        params.gamma * (y - state.level - state.trend) + (1.0 - params.gamma) * s_old;
    next.seasonals.assign(state.seasonals.begin() + 1, state.seasonals.end());
    next.seasonals.push_back(s_new);
    next.t = state.t + 1;
    return next;
}

/// h-step-ahead forecasts: level plus h times the trend plus the seasonal one
/// whole number of periods back, i.e. ring slot (h-1) mod m (the ring is
/// oldest first, so slot 0 is the seasonal for the very next step).
inline std::vector<double> forecast(const HwState& state, std::size_t horizon,
                                    const HwParams& params) {
    validate_hw_params(params);
    if (state.seasonals.size() != static_cast<std::size_t>(params.m)) {
        throw std::invalid_argument("forecast: seasonal ring size does not match the period");
    }
    if (horizon < 1) throw std::invalid_argument("forecast: horizon must be at least 1");
    const std::size_t m = state.seasonals.size();
    std::vector<double> out(horizon);
    for (std::size_t h = 1; h <= horizon; ++h) {
        out[h - 1] = state.level + static_cast<double>(h) * state.trend +
                     state.seasonals[(h - 1) % m];
    }
    return out;
}

namespace detail {

struct SmoothRun {
    HwState state;
    double sse = 0.0;
};

/// Runs smooth_step over a whole series with a phase-indexed seasonal buffer
/// (O(1) per step instead of rotating the ring), accumulating one-step-ahead
/// squared errors. The arithmetic matches smooth_step expression for
/// expression, so trajectories agree bit for bit.
inline SmoothRun run_smoothing(const std::vector<double>& values, const HwParams& params,
                               const HwState& start) {
    validate_hw_params(params);
    const std::size_t m = static_cast<std::size_t>(params.m);
    if (start.seasonals.size() != m) {
        throw std::invalid_argument("run_smoothing: seasonal ring size does not match the period");
    }
    std::vector<double> ring = start.seasonals;  // ring[i] aligned with value index i mod m
    double level = start.level;
    double trend = start.trend;
    double sse = 0.0;
    const std::size_t n = values.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double y = values[j];
        if (!std::isfinite(y)) throw std::invalid_argument("run_smoothing: non-finite value");
        const std::size_t ph = j % m;
        const double s_old = ring[ph];
        const double err = y - (level + trend + s_old);
        sse += err * err;
        const double l_old = level;
        const double b_old = trend;
        level = params.alpha * (y - s_old) + (1.0 - params.alpha) * (l_old + b_old);
        trend = params.beta * (level - l_old) + (1.0 - params.beta) * b_old;
        ring[ph] = params.gamma * (y - l_old - b_old) + (1.0 - params.gamma) * s_old;
    }
    SmoothRun run;
    run.state.level = level;
    run.state.trend = trend;
    run.state.seasonals.resize(m);
    for (std::size_t i = 0; i < m; ++i) run.state.seasonals[i] = ring[(n + i) % m];
    run.state.t = start.t + static_cast<std::int64_t>(n);
    run.sse = sse;
    return run;
}

}  // namespace detail

struct HwFit {
    HwParams params;
    HwState state;  // terminal state, ready for forecasting
    double sse = 0.0;
};

/// Fits the smoothing constants by minimizing in-sample one-step-ahead
/// squared error over [0,1]^3: a coarse 0.1-step grid scan picks the basin,
/// then a simplex refinement (clamped to the cube) polishes it. The search
/// space is compact, so this never fails outright.
inline HwFit fit(const std::vector<double>& values, int season_length) {
    if (season_length < 2) {
        throw std::invalid_argument("fit: seasonal period must be at least 2");
    }
    if (values.size() < 2 * static_cast<std::size_t>(season_length) + 10) {
        throw std::invalid_argument("fit: need at least two seasons plus ten points");
    }
    const HwState start = initialize(values, season_length);

    auto sse_of = [&](double a, double b, double g) {
        HwParams p;
        p.alpha = a;
        p.beta = b;
        p.gamma = g;
        p.m = season_length;
        return detail::run_smoothing(values, p, start).sse;
    };

    double best_a = 0.0, best_b = 0.0, best_g = 0.0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int ia = 0; ia <= 10; ++ia) {
        for (int ib = 0; ib <= 10; ++ib) {
            for (int ig = 0; ig <= 10; ++ig) {
                const double a = 0.1 * ia, b = 0.1 * ib, g = 0.1 * ig;
                const double sse = sse_of(a, b, g);
                if (sse < best_sse) {
                    best_sse = sse;
                    best_a = a;
                    best_b = b;
                    best_g = g;
                }
            }
        }
    }

    // Simplex refinement around the grid winner; points outside the cube are
    // clamped with a penalty proportional to the excursion.
    const double penalty_scale = 1.0 + std::abs(best_sse);
    auto objective = [&](const Eigen::VectorXd& x) {
        double clamped[3];
        double penalty = 0.0;
        for (int i = 0; i < 3; ++i) {
            clamped[i] = std::clamp(x[i], 0.0, 1.0);
            const double over = x[i] - clamped[i];
            penalty += over * over;
        }
        return sse_of(clamped[0], clamped[1], clamped[2]) + penalty_scale * penalty;
    };
    Eigen::VectorXd x0(3);
    x0 << best_a, best_b, best_g;
    const NelderMeadResult refined = nelder_mead(objective, x0, NelderMeadOptions{});
    const double ra = std::clamp(refined.x[0], 0.0, 1.0);
    const double rb = std::clamp(refined.x[1], 0.0, 1.0);
    const double rg = std::clamp(refined.x[2], 0.0, 1.0);
    if (sse_of(ra, rb, rg) < best_sse) {
        best_a = ra;
        best_b = rb;
        best_g = rg;
    }

    HwFit out;
    out.params.alpha = best_a;
    out.params.beta = best_b;
    out.params.gamma = best_g;
    out.params.m = season_length;
    const detail::SmoothRun run = detail::run_smoothing(values, out.params, start);
    out.state = run.state;
    out.sse = run.sse;
    return out;
}

inline HwFit fit(const TimeSeries& series, int season_length) {
    return fit(series.values, season_length);
}

/// Warm-started re-optimization: simplex descent from known-good smoothing
/// constants, skipping the coarse grid. Used when re-fitting repeatedly over
/// a growing history, where the optimum moves only slightly per step.
inline HwFit refine(const std::vector<double>& values, const HwParams& start_params) {
    validate_hw_params(start_params);
    if (values.size() < 2 * static_cast<std::size_t>(start_params.m)) {
        throw std::invalid_argument("refine: need at least two full seasons");
    }
    const HwState start = initialize(values, start_params.m);

    auto sse_of = [&](double a, double b, double g) {
        HwParams p = start_params;
        p.alpha = a;
        p.beta = b;
        p.gamma = g;
        return detail::run_smoothing(values, p, start).sse;
    };

    double best_a = start_params.alpha, best_b = start_params.beta, best_g = start_params.gamma;
    double best_sse = sse_of(best_a, best_b, best_g);
    const double penalty_scale = 1.0 + std::abs(best_sse);
    auto objective = [&](const Eigen::VectorXd& x) {
        double clamped[3];
        double penalty = 0.0;
        for (int i = 0; i < 3; ++i) {
            clamped[i] = std::clamp(x[i], 0.0, 1.0);
            const double over = x[i] - clamped[i];
            penalty += over * over;
        }
        return sse_of(clamped[0], clamped[1], clamped[2]) + penalty_scale * penalty;
    };
    Eigen::VectorXd x0(3);
    x0 << best_a, best_b, best_g;
    const NelderMeadResult refined = nelder_mead(objective, x0, NelderMeadOptions{});
    const double ra = std::clamp(refined.x[0], 0.0, 1.0);
    const double rb = std::clamp(refined.x[1], 0.0, 1.0);
    const double rg = std::clamp(refined.x[2], 0.0, 1.0);
    if (sse_of(ra, rb, rg) < best_sse) {
        best_a = ra;
        best_b = rb;
        best_g = rg;
    }

    HwFit out;
    out.params = start_params;
    out.params.alpha = best_a;
    out.params.beta = best_b;
    out.params.gamma = best_g;
    const detail::SmoothRun run = detail::run_smoothing(values, out.params, start);
    out.state = run.state;
    out.sse = run.sse;
    return out;
}

}  // namespace rollcast
