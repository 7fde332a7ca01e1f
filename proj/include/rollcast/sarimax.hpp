#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rollcast/calendar.hpp"
#include "rollcast/lag_polynomial.hpp"
#include "rollcast/nelder_mead.hpp"
#include "rollcast/random.hpp"
#include "rollcast/series.hpp"
#include "rollcast/statespace.hpp"

namespace rollcast {

/// Nonseasonal model order (p, d, q).
struct ModelOrder {
    int p = 0;
    int d = 0;
    int q = 0;
};

/// Seasonal order (P, D, Q, S); S = 0 means no seasonal part at all.
struct SeasonalOrder {
    int P = 0;
    int D = 0;
    int Q = 0;
    int S = 0;
};

inline void validate_orders(const ModelOrder& order, const SeasonalOrder& seasonal) {
    if (order.p < 0 || order.q < 0 || order.d < 0 || seasonal.P < 0 || seasonal.Q < 0 ||
        seasonal.D < 0 || seasonal.S < 0) {
        throw std::invalid_argument("model order: negative component");
    }
    if (order.p > 30 || order.q > 30) {
        throw std::invalid_argument("model order: p and q are limited to 30");
    }
    if (order.d > 2) throw std::invalid_argument("model order: d is limited to 2");
    if (seasonal.S == 0) {
        if (seasonal.P != 0 || seasonal.D != 0 || seasonal.Q != 0) {
            throw std::invalid_argument("seasonal order: S = 0 requires P = D = Q = 0");
        }
    } else if (seasonal.S < 2) {
        throw std::invalid_argument("seasonal order: seasonal period must be at least 2");
    }
}

/// Estimated parameter set. phi/theta are the nonseasonal AR/MA coefficients,
/// seasonal_phi/seasonal_theta the seasonal ones, beta the regression
/// coefficients aligned with the fitted exogenous columns (an intercept, when
/// fitted, is the column named "const").
struct SarimaxParams {
    std::vector<double> phi;
    std::vector<double> theta;
    std::vector<double> seasonal_phi;
    std::vector<double> seasonal_theta;
    std::vector<double> beta;
    double sigma2 = 1.0;
};

struct FittedModel {
    ModelOrder order;
    SeasonalOrder seasonal;
    SarimaxParams params;
    std::vector<std::string> exog_names;  // aligned with params.beta
    double loglik = 0.0;
    double aic = 0.0;
    std::int64_t n_obs_effective = 0;
    bool converged = false;

    bool has_intercept() const { return !exog_names.empty() && exog_names.front() == "const"; }
    std::size_t n_user_exog() const { return exog_names.size() - (has_intercept() ? 1u : 0u); }
};

// ---------------------------------------------------------------------------
// Differencing and its inverse
// ---------------------------------------------------------------------------

namespace detail {

inline void kahan_add(double& sum, double& comp, double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
}

inline std::vector<double> diff_once(const std::vector<double>& v, std::size_t lag) {
    std::vector<double> out(v.size() - lag);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i + lag] - v[i];
    return out;
}

}  // namespace detail

/// Applies (1−L)^d (1−L^S)^D; output length is n − d − D·S.
inline std::vector<double> difference(const std::vector<double>& values, int d, int D,
                                      int season_length) {
    if (d < 0 || D < 0) throw std::invalid_argument("difference: negative order");
    if (D > 0 && season_length < 2) {
        throw std::invalid_argument("difference: seasonal differencing needs a period of at least 2");
    }
    const std::size_t span = static_cast<std::size_t>(d) +
                             static_cast<std::size_t>(D) * static_cast<std::size_t>(season_length);
    if (values.size() <= span) {
        throw std::invalid_argument("difference: series shorter than the differencing span");
    }
    std::vector<double> out = values;
    for (int i = 0; i < d; ++i) out = detail::diff_once(out, 1);
    for (int j = 0; j < D; ++j) out = detail::diff_once(out, static_cast<std::size_t>(season_length));
    return out;
}

inline TimeSeries difference(const TimeSeries& series, int d, int D, int season_length) {
    TimeSeries out;
    out.values = difference(series.values, d, D, season_length);
    out.interval_seconds = series.interval_seconds;
    const std::int64_t span = static_cast<std::int64_t>(d) +
                              static_cast<std::int64_t>(D) * static_cast<std::int64_t>(season_length);
    out.start = series.start + span * series.interval_seconds;
    return out;
}

/// Inverse of `difference` for values that continue the series: given points
/// on the fully differenced scale and the undifferenced history they extend,
/// rebuilds the points on the original scale. Running sums use compensated
/// (Kahan) accumulation so difference → integrate round trips do not drift.
inline std::vector<double> integrate(const std::vector<double>& continuation,
                                     const std::vector<double>& history, int d, int D,
                                     int season_length) {
    if (d < 0 || D < 0) throw std::invalid_argument("integrate: negative order");
    if (D > 0 && season_length < 2) {
        throw std::invalid_argument("integrate: seasonal integration needs a period of at least 2");
    }
    if (d == 0 && D == 0) return continuation;
    const std::size_t s = static_cast<std::size_t>(season_length);
    const std::size_t span = static_cast<std::size_t>(d) + static_cast<std::size_t>(D) * s;
    if (history.size() < span) {
        throw std::invalid_argument("integrate: history shorter than the differencing span");
    }

    // Difference stack: levels[0] is the raw history, then d regular levels,
    // then D seasonal levels — mirroring how `difference` was applied.
    std::vector<std::vector<double>> levels;
    levels.reserve(static_cast<std::size_t>(d + D) + 1);
    levels.push_back(history);
    for (int i = 0; i < d; ++i) levels.push_back(detail::diff_once(levels.back(), 1));
    for (int j = 0; j < D; ++j) levels.push_back(detail::diff_once(levels.back(), s));

    std::vector<double> current = continuation;
    for (int lev = d + D; lev >= 1; --lev) {
        const std::vector<double>& base = levels[static_cast<std::size_t>(lev) - 1];
        std::vector<double> out(current.size());
        if (lev > d) {
            // Undo one seasonal difference: x_t = w_t + x_{t−S}; one Kahan
            // chain per seasonal phase, anchored at the history tail.
            std::vector<double> sum(s, 0.0), comp(s, 0.0);
            for (std::size_t i = 0; i < current.size(); ++i) {
                const std::size_t ph = i % s;
                if (i < s) {
                    sum[ph] = base[base.size() - s + i];
                    comp[ph] = 0.0;
                }
                detail::kahan_add(sum[ph], comp[ph], current[i]);
                out[i] = sum[ph];
            }
        } else {
            // Undo one regular difference: a single running compensated sum.
            double sum = base.back();
            double comp = 0.0;
            for (std::size_t i = 0; i < current.size(); ++i) {
                detail::kahan_add(sum, comp, current[i]);
                out[i] = sum;
            }
        }
        current = std::move(out);
    }
    return current;
}

// ---------------------------------------------------------------------------
// Likelihood machinery
// ---------------------------------------------------------------------------

namespace detail {

/// Least squares via the normal equations; adequate for the small systems
/// used in seeding and the innovations GLS step.
inline Eigen::VectorXd lstsq(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    return (x.transpose() * x).ldlt().solve(x.transpose() * y);
}

struct UnpackedCoeffs {
    std::vector<double> phi, theta, seasonal_phi, seasonal_theta;
};

/// Maps the unconstrained optimizer vector to model coefficients. Layout is
/// [p AR, q MA, P seasonal-AR, Q seasonal-MA], each block passing through
/// partial autocorrelations so that every visited model is stationary and
/// invertible by construction.
inline UnpackedCoeffs unpack_coeffs(const Eigen::VectorXd& z, int p, int q, int P, int Q) {
    auto block_to_ar = [&z](int offset, int len) {
        std::vector<double> partials(static_cast<std::size_t>(len));
        for (int i = 0; i < len; ++i) {
            partials[static_cast<std::size_t>(i)] = partial_from_unconstrained(z[offset + i]);
        }
        return pacf_to_ar(partials);
    };
    UnpackedCoeffs c;
    int at = 0;
    c.phi = block_to_ar(at, p);
    at += p;
    c.theta = block_to_ar(at, q);
    for (double& t : c.theta) t = -t;  // MA invertibility via the mirrored AR map
    at += q;
    c.seasonal_phi = block_to_ar(at, P);
    at += P;
    c.seasonal_theta = block_to_ar(at, Q);
    for (double& t : c.seasonal_theta) t = -t;
    return c;
}

/// Appends the unconstrained representation of one stable AR block to `out`,
/// shrinking the coefficients toward zero first if they sit on or outside the
/// stationarity boundary (seeds are allowed to be sloppy; the optimizer is
/// not).
inline void append_block(std::vector<double>& out, std::vector<double> ar_coeffs) {
    const std::size_t len = ar_coeffs.size();
    for (int attempt = 0; attempt < 120; ++attempt) {
        try {
            std::vector<double> partials = ar_to_pacf(ar_coeffs);
            for (double r : partials) {
                out.push_back(unconstrained_from_partial(std::clamp(r, -0.98, 0.98)));
            }
            return;
        } catch (const std::exception&) {
            for (double& c : ar_coeffs) c *= 0.9;
        }
    }
    out.insert(out.end(), len, 0.0);
}

/// Inverse of unpack_coeffs, used to warm-start from previous parameters.
inline Eigen::VectorXd pack_coeffs(const SarimaxParams& params) {
    std::vector<double> z;
    append_block(z, params.phi);
    std::vector<double> ma = params.theta;
    for (double& t : ma) t = -t;
    append_block(z, ma);
    append_block(z, params.seasonal_phi);
    std::vector<double> sma = params.seasonal_theta;
    for (double& t : sma) t = -t;
    append_block(z, sma);
    return Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
}

/// Concentrated-likelihood evaluation on the differenced, scale-normalized
/// data. The innovation variance is concentrated analytically and the
/// regression coefficients by weighted least squares on the Kalman
/// innovations (the gain sequence is data-independent, so y and the exog
/// columns share one filter pass); the optimizer searches only the ARMA
/// coefficient space.
struct SarimaxProblem {
    Eigen::VectorXd y;  // differenced, divided by the normalization scale
    Eigen::MatrixXd x;  // differenced exogenous columns
    int p = 0, q = 0, P = 0, Q = 0, S = 0;

    int dim() const { return p + q + P + Q; }
    Eigen::Index n() const { return y.size(); }
    Eigen::Index k() const { return x.cols(); }

    struct Eval {
        bool ok = false;
        double negloglik = std::numeric_limits<double>::infinity();
        Eigen::VectorXd beta;  // scaled-data units
        double sigma2 = 0.0;   // scaled-data units
        UnpackedCoeffs coeffs;
    };

    Eval evaluate(const Eigen::VectorXd& z) const {
        Eval eval;
        try {
            eval.coeffs = unpack_coeffs(z, p, q, P, Q);
            const LagPolynomial ar_full = expand_polynomials(
                {eval.coeffs.phi, LagKind::ar}, {eval.coeffs.seasonal_phi, LagKind::ar}, S);
            const LagPolynomial ma_full = expand_polynomials(
                {eval.coeffs.theta, LagKind::ma}, {eval.coeffs.seasonal_theta, LagKind::ma}, S);
            const StateSpaceModel model = build_arma_ssm(ar_full, ma_full, 1.0);

            Eigen::MatrixXd columns(n(), 1 + k());
            columns.col(0) = y;
            if (k() > 0) columns.rightCols(k()) = x;
            const InnovationsRun run = kalman_innovations(model, columns);
            if (!run.ok) return eval;

            const Eigen::ArrayXd weights = run.variances.array().inverse();
            Eigen::VectorXd resid = run.innovations.col(0);
            if (k() > 0) {
                const Eigen::MatrixXd vx = run.innovations.rightCols(k());
                Eigen::MatrixXd vxw = vx;
                for (Eigen::Index j = 0; j < vxw.cols(); ++j) vxw.col(j).array() *= weights;
                const Eigen::MatrixXd gram = vx.transpose() * vxw;
                const Eigen::VectorXd rhs = vxw.transpose() * resid;
                eval.beta = gram.ldlt().solve(rhs);
                if (!eval.beta.allFinite()) return eval;
                resid -= vx * eval.beta;
            } else {
                eval.beta.resize(0);
            }

            const double n_d = static_cast<double>(n());
            const double ssq = (resid.array().square() * weights).sum();
            if (!(ssq > 0.0) || !std::isfinite(ssq)) return eval;
            eval.sigma2 = ssq / n_d;
            const double sum_log_f = run.variances.array().log().sum();
            eval.negloglik =
                0.5 * (n_d * (kLog2Pi + 1.0) + n_d * std::log(eval.sigma2) + sum_log_f);
            eval.ok = std::isfinite(eval.negloglik);
            return eval;
        } catch (const std::exception&) {
            return eval;
        }
    }
};

/// Hannan–Rissanen style starting values: a long autoregression approximates
/// the innovations, then one least-squares pass over the AR/MA lag sets gives
/// rough coefficients (seasonal lags treated additively — good enough for a
/// seed). Falls back to zeros whenever the data is too short or degenerate.
inline Eigen::VectorXd hr_seed(const SarimaxProblem& prob) {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(prob.dim());
    if (prob.dim() == 0) return zero;
    const Eigen::Index n = prob.n();

    Eigen::VectorXd e = prob.y;
    if (prob.k() > 0) {
        const Eigen::VectorXd b0 = lstsq(prob.x, prob.y);
        if (!b0.allFinite()) return zero;
        e -= prob.x * b0;
    }

    // Regression lag sets; a seasonal lag colliding with a nonseasonal one is
    // left unseeded rather than duplicating a design column.
    struct LagRef {
        int lag;
        std::vector<double>* target;
        std::size_t index;
    };
    std::vector<double> phi(static_cast<std::size_t>(prob.p), 0.0);
    std::vector<double> theta(static_cast<std::size_t>(prob.q), 0.0);
    std::vector<double> sphi(static_cast<std::size_t>(prob.P), 0.0);
    std::vector<double> stheta(static_cast<std::size_t>(prob.Q), 0.0);
    std::vector<LagRef> ar_refs, ma_refs;
    for (int i = 1; i <= prob.p; ++i) ar_refs.push_back({i, &phi, static_cast<std::size_t>(i - 1)});
    for (int j = 1; j <= prob.P; ++j) {
        const int lag = j * prob.S;
        if (lag > prob.p) ar_refs.push_back({lag, &sphi, static_cast<std::size_t>(j - 1)});
    }
    for (int i = 1; i <= prob.q; ++i) ma_refs.push_back({i, &theta, static_cast<std::size_t>(i - 1)});
    for (int j = 1; j <= prob.Q; ++j) {
        const int lag = j * prob.S;
        if (lag > prob.q) ma_refs.push_back({lag, &stheta, static_cast<std::size_t>(j - 1)});
    }

    auto finish = [&]() {
        std::vector<double> z;
        append_block(z, phi);
        std::vector<double> ma = theta;
        for (double& t : ma) t = -t;
        append_block(z, ma);
        append_block(z, sphi);
        std::vector<double> sma = stheta;
        for (double& t : sma) t = -t;
        append_block(z, sma);
        return Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size())).eval();
    };

    int max_ar_lag = 0, max_ma_lag = 0;
    for (const auto& ref : ar_refs) max_ar_lag = std::max(max_ar_lag, ref.lag);
    for (const auto& ref : ma_refs) max_ma_lag = std::max(max_ma_lag, ref.lag);

    // Innovations from a long autoregression (only needed with MA terms).
    Eigen::VectorXd eps;
    Eigen::Index eps_start = 0;
    if (!ma_refs.empty()) {
        const int long_order = static_cast<int>(
            std::min<Eigen::Index>(n / 4, std::max(20, max_ar_lag + max_ma_lag)));
        if (long_order < 1 || n - long_order < long_order + 8) return finish();
        const Eigen::Index rows = n - long_order;
        Eigen::MatrixXd xl(rows, long_order);
        Eigen::VectorXd yl(rows);
        for (Eigen::Index t = 0; t < rows; ++t) {
            yl[t] = e[t + long_order];
            for (int j = 0; j < long_order; ++j) xl(t, j) = e[t + long_order - 1 - j];
        }
        const Eigen::VectorXd bl = lstsq(xl, yl);
        if (!bl.allFinite()) return finish();
        eps = yl - xl * bl;
        eps_start = long_order;  // eps[t - eps_start] is the innovation proxy at time t
    }

    const Eigen::Index t0 = std::max<Eigen::Index>(
        max_ar_lag, ma_refs.empty() ? 0 : eps_start + max_ma_lag);
    const Eigen::Index rows = n - t0;
    const Eigen::Index cols = static_cast<Eigen::Index>(ar_refs.size() + ma_refs.size());
    if (cols == 0 || rows < cols + 8) return finish();

    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd target(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index t = r + t0;
        target[r] = e[t];
        Eigen::Index c = 0;
        for (const auto& ref : ar_refs) design(r, c++) = e[t - ref.lag];
        for (const auto& ref : ma_refs) design(r, c++) = eps[t - ref.lag - eps_start];
    }
    const Eigen::VectorXd b = lstsq(design, target);
    if (!b.allFinite()) return finish();
    Eigen::Index c = 0;
    for (const auto& ref : ar_refs) (*ref.target)[ref.index] = b[c++];
    for (const auto& ref : ma_refs) (*ref.target)[ref.index] = b[c++];
    return finish();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

enum class InterceptMode {
    automatic,  // intercept iff no differencing is applied
    always,
    never,
};

struct FitOptions {
    std::uint64_t seed = 0;
    int max_restarts = 3;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    InterceptMode intercept = InterceptMode::automatic;
    std::optional<SarimaxParams> warm_start;
};

/// Maximum-likelihood fit of a SARIMAX model: the series (and any exogenous
/// columns) are differenced per (d, D, S), and the exact Gaussian likelihood
/// of the remainder is maximized over the stationarity-constrained
/// coefficient space with a simplex optimizer seeded by Hannan–Rissanen
/// estimates. Optimizer failure is reported through converged=false rather
/// than an exception so that grid search can keep going.
inline FittedModel fit(const TimeSeries& series, const ModelOrder& order,
                       const SeasonalOrder& seasonal = {}, const ExogMatrix* exog = nullptr,
                       const FitOptions& options = {}) {
    validate_orders(order, seasonal);
    const std::size_t n = series.size();
    for (double v : series.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite value in series");
    }
    if (exog) {
        if (exog->size() != n) {
            throw std::invalid_argument("fit: exogenous row count does not match series length");
        }
        if (exog->column_names.size() != exog->n_features()) {
            throw std::invalid_argument("fit: exogenous column names do not match column count");
        }
        if (!exog->rows.allFinite()) {
            throw std::invalid_argument("fit: non-finite value in exogenous matrix");
        }
        for (const auto& name : exog->column_names) {
            if (name == "const") {
                throw std::invalid_argument(
                    "fit: exogenous column name 'const' is reserved for the intercept");
            }
        }
    }

    const bool intercept_on = options.intercept == InterceptMode::always
                                  ? true
                                  : options.intercept == InterceptMode::never
                                        ? false
                                        : (order.d + seasonal.D == 0);

    std::vector<std::string> names;
    if (intercept_on) names.push_back("const");
    if (exog) names.insert(names.end(), exog->column_names.begin(), exog->column_names.end());
    const std::size_t k_total = names.size();

    // Difference the series and every regression column identically.
    const std::vector<double> w = difference(series.values, order.d, seasonal.D, seasonal.S);
    const Eigen::Index n_eff = static_cast<Eigen::Index>(w.size());
    const int min_len = 10 + order.p + order.q + seasonal.P * seasonal.S + seasonal.Q * seasonal.S;
    if (n_eff < min_len) {
        throw std::invalid_argument("fit: series too short after differencing for this order");
    }

    Eigen::MatrixXd xd(n_eff, static_cast<Eigen::Index>(k_total));
    {
        std::vector<double> col(n);
        for (std::size_t j = 0; j < k_total; ++j) {
            if (intercept_on && j == 0) {
                // The intercept lives on the differenced scale: a constant
                // there is a drift on the original scale, which keeps the
                // term meaningful when d + D > 0 (differencing a constant
                // column would zero it out).
                xd.col(0).setOnes();
                continue;
            }
            const std::size_t uj = j - (intercept_on ? 1 : 0);
            for (std::size_t t = 0; t < n; ++t) {
                col[t] = exog->rows(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(uj));
            }
            const std::vector<double> cd = difference(col, order.d, seasonal.D, seasonal.S);
            for (Eigen::Index t = 0; t < n_eff; ++t) xd(t, static_cast<Eigen::Index>(j)) = cd[static_cast<std::size_t>(t)];
        }
    }
    for (std::size_t j = 0; j < k_total; ++j) {
        if (xd.col(static_cast<Eigen::Index>(j)).cwiseAbs().maxCoeff() == 0.0) {
            throw std::invalid_argument("fit: exogenous column '" + names[j] +
                                        "' is all zero after differencing");
        }
    }

    // Normalize the working series to unit scale: the optimizer then sees the
    // same landscape regardless of the input's units, which is what makes
    // fits scale-equivariant in practice.
    Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), n_eff);
    const double mean = wv.mean();
    double scale = std::sqrt((wv.array() - mean).square().sum() / static_cast<double>(n_eff));
    if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;

    detail::SarimaxProblem problem;
    problem.y = wv / scale;
    problem.x = xd;
    problem.p = order.p;
    problem.q = order.q;
    problem.P = seasonal.P;
    problem.Q = seasonal.Q;
    problem.S = seasonal.S;

    FittedModel out;
    out.order = order;
    out.seasonal = seasonal;
    out.exog_names = names;
    out.n_obs_effective = n_eff;

    Eigen::VectorXd z0;
    const bool warm_ok = options.warm_start &&
                         options.warm_start->phi.size() == static_cast<std::size_t>(order.p) &&
                         options.warm_start->theta.size() == static_cast<std::size_t>(order.q) &&
                         options.warm_start->seasonal_phi.size() == static_cast<std::size_t>(seasonal.P) &&
                         options.warm_start->seasonal_theta.size() == static_cast<std::size_t>(seasonal.Q);
    z0 = warm_ok ? detail::pack_coeffs(*options.warm_start) : detail::hr_seed(problem);

    auto objective = [&problem](const Eigen::VectorXd& z) {
        const auto eval = problem.evaluate(z);
        // Infeasible points get a large finite penalty that grows away from
        // the origin, nudging the simplex back toward tame parameters.
        if (!eval.ok) return 1e12 * (1.0 + 1e-3 * z.squaredNorm());
        return eval.negloglik;
    };

    Eigen::VectorXd z_best = z0;
    bool converged = true;
    if (problem.dim() > 0) {
        NelderMeadOptions nm;
        nm.deadline = options.deadline;
        double f_best = std::numeric_limits<double>::infinity();
        converged = false;
        Eigen::VectorXd start = z0;
        for (int attempt = 0; attempt <= std::max(0, options.max_restarts); ++attempt) {
            const NelderMeadResult run = nelder_mead(objective, start, nm);
            if (run.fval < f_best) {
                f_best = run.fval;
                z_best = run.x;
                converged = run.converged;
            }
            if (converged || run.deadline_hit) break;
            NormalSampler sampler(mix_seed(options.seed, 0x5eed0000u + static_cast<std::uint64_t>(attempt)));
            start = z_best;
            for (Eigen::Index i = 0; i < start.size(); ++i) start[i] += 0.3 * sampler.normal();
        }
    }

    const auto final_eval = problem.evaluate(z_best);
    if (!final_eval.ok) {
        out.params.phi.assign(static_cast<std::size_t>(order.p), 0.0);
        out.params.theta.assign(static_cast<std::size_t>(order.q), 0.0);
        out.params.seasonal_phi.assign(static_cast<std::size_t>(seasonal.P), 0.0);
        out.params.seasonal_theta.assign(static_cast<std::size_t>(seasonal.Q), 0.0);
        out.params.beta.assign(k_total, 0.0);
        out.params.sigma2 = 0.0;
        out.loglik = -std::numeric_limits<double>::infinity();
        out.aic = std::numeric_limits<double>::infinity();
        out.converged = false;
        return out;
    }

    out.params.phi = final_eval.coeffs.phi;
    out.params.theta = final_eval.coeffs.theta;
    out.params.seasonal_phi = final_eval.coeffs.seasonal_phi;
    out.params.seasonal_theta = final_eval.coeffs.seasonal_theta;
    out.params.beta.resize(k_total);
    for (std::size_t j = 0; j < k_total; ++j) {
        out.params.beta[j] = final_eval.beta[static_cast<Eigen::Index>(j)] * scale;
    }
    out.params.sigma2 = final_eval.sigma2 * scale * scale;
    out.loglik = -final_eval.negloglik - static_cast<double>(n_eff) * std::log(scale);
    const double k_params = static_cast<double>(order.p + order.q + seasonal.P + seasonal.Q) +
                            static_cast<double>(k_total) + 1.0;
    out.aic = 2.0 * k_params - 2.0 * out.loglik;
    out.converged = converged;
    return out;
}

// ---------------------------------------------------------------------------
// Forecasting
// ---------------------------------------------------------------------------

/// Incremental forecaster around a fitted model: keeps the regression
/// residual series, its differenced form, and a running Kalman state, so that
/// appending one observation is O(state²) instead of a full refilter. This is
/// the engine under both one-shot forecasting and the rolling harness.
class SarimaxForecaster {
  public:
    SarimaxForecaster(FittedModel model, std::vector<double> history,
                      Eigen::MatrixXd history_user_exog = Eigen::MatrixXd())
        : model_(std::move(model)), values_(std::move(history)) {
        const std::size_t n_user = model_.n_user_exog();
        if (model_.exog_names.size() != model_.params.beta.size()) {
            throw std::invalid_argument("forecaster: beta size does not match exogenous columns");
        }
        if (n_user == 0) {
            if (history_user_exog.size() != 0) {
                throw std::invalid_argument("forecaster: model was fit without exogenous columns");
            }
            exog_rows_ = 0;
        } else {
            if (static_cast<std::size_t>(history_user_exog.rows()) != values_.size() ||
                static_cast<std::size_t>(history_user_exog.cols()) != n_user) {
                throw std::invalid_argument("forecaster: exogenous history has the wrong shape");
            }
            user_exog_ = std::move(history_user_exog);
            exog_rows_ = user_exog_.rows();
        }
        rebuild();
    }

    const FittedModel& model() const { return model_; }
    const std::vector<double>& values() const { return values_; }
    Eigen::Ref<const Eigen::MatrixXd> user_exog() const {
        return user_exog_.topRows(exog_rows_);
    }

    /// Multi-step forecast on the original scale. When the model carries user
    /// exogenous columns, `future_user_exog` must supply exactly one row per
    /// horizon step, in the fitted column order.
    std::vector<double> predict(std::size_t horizon,
                                const Eigen::MatrixXd& future_user_exog = Eigen::MatrixXd()) const {
        const std::size_t n_user = model_.n_user_exog();
        if (n_user == 0) {
            if (future_user_exog.size() != 0) {
                throw std::invalid_argument("predict: model was fit without exogenous columns");
            }
        } else if (static_cast<std::size_t>(future_user_exog.rows()) != horizon ||
                   static_cast<std::size_t>(future_user_exog.cols()) != n_user) {
            throw std::invalid_argument("predict: future exogenous matrix has the wrong shape");
        }
        if (horizon == 0) return {};

        const std::vector<ForecastPoint> points = kalman_forecast(ssm_, filter_, horizon);
        std::vector<double> means(horizon);
        for (std::size_t h = 0; h < horizon; ++h) means[h] = points[h].mean + drift();
        std::vector<double> u_hat =
            integrate(means, u_, model_.order.d, model_.seasonal.D, model_.seasonal.S);
        for (std::size_t h = 0; h < horizon; ++h) {
            double effect = 0.0;
            for (std::size_t j = 0; j < n_user; ++j) {
                effect += model_.params.beta[j + (model_.has_intercept() ? 1 : 0)] *
                          future_user_exog(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(j));
            }
            u_hat[h] += effect;
        }
        return u_hat;
    }

    /// One-step-ahead forecast; equals predict(1, row)[0].
    double predict_one(const Eigen::RowVectorXd& next_user_exog = Eigen::RowVectorXd()) const {
        Eigen::MatrixXd future(next_user_exog.size() > 0 ? 1 : 0, next_user_exog.size());
        if (next_user_exog.size() > 0) future.row(0) = next_user_exog;
        if (model_.n_user_exog() == 0) return predict(1)[0];
        return predict(1, future)[0];
    }

    /// Appends the true next observation: extends the histories and advances
    /// the Kalman state by one step. Parameters stay fixed.
    void observe(double y, const Eigen::RowVectorXd& user_exog_row = Eigen::RowVectorXd()) {
        if (!std::isfinite(y)) throw std::invalid_argument("observe: non-finite observation");
        const std::size_t n_user = model_.n_user_exog();
        if (static_cast<std::size_t>(user_exog_row.size()) != n_user) {
            throw std::invalid_argument("observe: exogenous row has the wrong width");
        }
        values_.push_back(y);
        if (n_user > 0) push_exog_row(user_exog_row);

        double effect = 0.0;
        for (std::size_t j = 0; j < n_user; ++j) {
            effect += model_.params.beta[j + (model_.has_intercept() ? 1 : 0)] *
                      user_exog_row[static_cast<Eigen::Index>(j)];
        }
        u_.push_back(y - effect);

        const std::size_t span = diff_span();
        double w_new;
        if (span == 0) {
            w_new = u_.back();
        } else {
            const std::vector<double> tail(u_.end() - static_cast<std::ptrdiff_t>(span + 1), u_.end());
            w_new = difference(tail, model_.order.d, model_.seasonal.D, model_.seasonal.S).back();
        }
        kalman_step(ssm_, filter_, w_new - drift());
    }

    /// Swaps in re-estimated parameters (same orders) and refilters the
    /// accumulated history under them.
    void set_model(FittedModel refitted) {
        if (refitted.exog_names != model_.exog_names) {
            throw std::invalid_argument("set_model: exogenous columns changed");
        }
        model_ = std::move(refitted);
        rebuild();
    }

  private:
    std::size_t diff_span() const {
        return static_cast<std::size_t>(model_.order.d) +
               static_cast<std::size_t>(model_.seasonal.D) * static_cast<std::size_t>(model_.seasonal.S);
    }

    /// Intercept coefficient on the differenced scale (drift when d + D > 0),
    /// mirroring how `fit` builds the constant column after differencing.
    double drift() const { return model_.has_intercept() ? model_.params.beta[0] : 0.0; }

    void push_exog_row(const Eigen::RowVectorXd& row) {
        if (exog_rows_ == user_exog_.rows()) {
            Eigen::MatrixXd bigger(std::max<Eigen::Index>(16, user_exog_.rows() * 2), row.size());
            bigger.topRows(user_exog_.rows()) = user_exog_;
            user_exog_.swap(bigger);
        }
        user_exog_.row(exog_rows_++) = row;
    }

    void rebuild() {
        const std::size_t n = values_.size();
        const std::size_t n_user = model_.n_user_exog();
        if (n <= diff_span()) {
            throw std::invalid_argument("forecaster: history shorter than the differencing span");
        }
        u_.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            double effect = 0.0;
            for (std::size_t j = 0; j < n_user; ++j) {
                effect += model_.params.beta[j + (model_.has_intercept() ? 1 : 0)] *
                          user_exog_(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
            }
            u_[t] = values_[t] - effect;
        }
        std::vector<double> w =
            difference(u_, model_.order.d, model_.seasonal.D, model_.seasonal.S);
        for (double& v : w) v -= drift();

        const LagPolynomial ar_full =
            expand_polynomials({model_.params.phi, LagKind::ar},
                               {model_.params.seasonal_phi, LagKind::ar}, model_.seasonal.S);
        const LagPolynomial ma_full =
            expand_polynomials({model_.params.theta, LagKind::ma},
                               {model_.params.seasonal_theta, LagKind::ma}, model_.seasonal.S);
        ssm_ = build_arma_ssm(ar_full, ma_full, std::max(model_.params.sigma2, 1e-300));
        filter_ = kalman_filter(ssm_, w);
    }

    FittedModel model_;
    std::vector<double> values_;
    Eigen::MatrixXd user_exog_;  // capacity rows; exog_rows_ are in use
    Eigen::Index exog_rows_ = 0;
    std::vector<double> u_;  // regression residual series
    StateSpaceModel ssm_;
    FilterState filter_;
};

/// One-shot forecast on the original scale from a fitted model and the series
/// it was fitted on. `future_exog`/`history_exog` are required exactly when
/// the model carries user exogenous columns, with matching names and shapes.
inline std::vector<double> forecast(const FittedModel& model, const TimeSeries& history,
                                    std::size_t horizon, const ExogMatrix* future_exog = nullptr,
                                    const ExogMatrix* history_exog = nullptr) {
    const std::size_t n_user = model.n_user_exog();
    std::vector<std::string> user_names(model.exog_names.begin() + (model.has_intercept() ? 1 : 0),
                                        model.exog_names.end());
    if (n_user == 0) {
        if (future_exog || history_exog) {
            throw std::invalid_argument("forecast: model was fit without exogenous columns");
        }
    } else {
        if (!future_exog || !history_exog) {
            throw std::invalid_argument("forecast: model requires future and history exogenous data");
        }
        if (future_exog->column_names != user_names || history_exog->column_names != user_names) {
            throw std::invalid_argument("forecast: exogenous column names do not match the fit");
        }
        if (future_exog->size() != horizon) {
            throw std::invalid_argument("forecast: future exogenous matrix must have horizon rows");
        }
        if (history_exog->size() != history.size()) {
            throw std::invalid_argument("forecast: history exogenous matrix has the wrong row count");
        }
    }
    if (horizon == 0) return {};

    SarimaxForecaster forecaster(model, history.values,
                                 n_user > 0 ? history_exog->rows : Eigen::MatrixXd());
    return forecaster.predict(horizon, n_user > 0 ? future_exog->rows : Eigen::MatrixXd());
}

}  // namespace rollcast
