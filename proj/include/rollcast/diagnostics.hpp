#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rollcast/series.hpp"

namespace rollcast {

namespace detail {

struct OlsFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd tvalues;
    double ssr = 0.0;
    Eigen::Index n = 0;
    Eigen::Index k = 0;
};

inline OlsFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    OlsFit fit;
    fit.n = x.rows();
    fit.k = x.cols();
    if (fit.n <= fit.k) throw std::invalid_argument("ols: more regressors than observations");
    const Eigen::MatrixXd xtx = x.transpose() * x;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    if (ldlt.info() != Eigen::Success) throw std::invalid_argument("ols: singular design matrix");
    fit.beta = ldlt.solve(x.transpose() * y);
    const Eigen::VectorXd resid = y - x * fit.beta;
    fit.ssr = resid.squaredNorm();
    const double sigma2 = fit.ssr / static_cast<double>(fit.n - fit.k);
    const Eigen::MatrixXd xtx_inv =
        ldlt.solve(Eigen::MatrixXd::Identity(fit.k, fit.k));
    fit.tvalues.resize(fit.k);
    for (Eigen::Index j = 0; j < fit.k; ++j) {
        const double se = std::sqrt(sigma2 * xtx_inv(j, j));
        fit.tvalues[j] = fit.beta[j] / se;
    }
    return fit;
}

/// Gaussian OLS AIC, the criterion used for automatic lag selection:
///   n·(log 2π + 1) + n·log(SSR/n) + 2k.
inline double ols_aic(const OlsFit& fit) {
    const double n = static_cast<double>(fit.n);
    return n * (std::log(2.0 * M_PI) + 1.0) + n * std::log(fit.ssr / n) +
           2.0 * static_cast<double>(fit.k);
}

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

}  // namespace detail

/// Augmented Dickey-Fuller unit-root test result. critical_values maps
/// "1%"/"5%"/"10%" to the MacKinnon (2010) response-surface critical values.
struct AdfResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int used_lags = 0;
    int n_obs = 0;  // observations entering the final test regression
    std::map<std::string, double> critical_values;
};

namespace detail {

/// MacKinnon (1994) approximate asymptotic p-value for the ADF tau statistic,
/// constant-only regression, one variable. The polynomial coefficients are the
/// published response-surface values (ascending powers of tau); the result is
/// Phi(poly(tau)), clipped to {0,1} outside the tabulated range.
inline double mackinnon_pvalue(double tau) {
    constexpr double tau_max = 2.47;
    constexpr double tau_min = -18.83;
    constexpr double tau_star = -1.61;
    static const double small_p[] = {2.1659, 1.4412, 0.038296};
    static const double large_p[] = {1.7339, 0.93202, -0.12745, -0.010368};

    if (tau > tau_max) return 1.0;
    if (tau < tau_min) return 0.0;
    double poly = 0.0;
    if (tau <= tau_star) {
        for (int i = 2; i >= 0; --i) poly = poly * tau + small_p[i];
    } else {
        for (int i = 3; i >= 0; --i) poly = poly * tau + large_p[i];
    }
    return norm_cdf(poly);
}

/// MacKinnon (2010) finite-sample critical values for the constant-only ADF
/// regression: polynomial in 1/nobs, ascending powers.
inline std::map<std::string, double> mackinnon_crit(int nobs) {
    static const double table[3][4] = {
        {-3.43035, -6.5393, -16.786, -79.433},  // 1%
        {-2.86154, -2.8903, -4.234, -40.040},   // 5%
        {-2.56677, -1.5384, -2.809, 0.0},       // 10%
    };
    const double base = 1.0 / static_cast<double>(nobs);
    const char* levels[] = {"1%", "5%", "10%"};
    std::map<std::string, double> crit;
    for (int i = 0; i < 3; ++i) {
        double v = 0.0;
        for (int j = 3; j >= 0; --j) v = v * base + table[i][j];
        crit[levels[i]] = v;
    }
    return crit;
}

/// Builds the ADF design matrix trimmed at `lag` delta-lags. Column order:
/// lagged level, delta-lag 1..lag, constant. Returns the trimmed response in
/// `y_out`.
inline Eigen::MatrixXd adf_design(const std::vector<double>& y, int lag, Eigen::VectorXd& y_out) {
    const std::size_t n = y.size();
    const std::size_t ndiff = n - 1;
    const std::size_t rows = ndiff - static_cast<std::size_t>(lag);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), lag + 2);
    y_out.resize(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + static_cast<std::size_t>(lag);  // index into the diff series
        y_out[static_cast<Eigen::Index>(r)] = y[t + 1] - y[t];
        x(static_cast<Eigen::Index>(r), 0) = y[t];  // level lagged once
        for (int j = 1; j <= lag; ++j) {
            const std::size_t s = t - static_cast<std::size_t>(j);
            x(static_cast<Eigen::Index>(r), j) = y[s + 1] - y[s];
        }
        x(static_cast<Eigen::Index>(r), lag + 1) = 1.0;  // constant
    }
    return x;
}

}  // namespace detail

/// Augmented Dickey-Fuller test with constant term:
///   Δy_t = c + ρ·y_{t−1} + Σ_{j=1..k} φ_j·Δy_{t−j} + ε_t
/// The reported statistic is the t-value of ρ. When `max_lag` is absent the
/// Schwert rule ⌊12·(n/100)^{1/4}⌋ bounds the search and the lag count is
/// chosen by minimizing the Gaussian OLS AIC over 0..max_lag on a common
/// sample (trimmed at max_lag); the final regression is re-trimmed at the
/// chosen lag. p-value and critical values use the MacKinnon response-surface
/// approximations.
inline AdfResult adf_test(const std::vector<double>& values,
                          std::optional<int> max_lag = std::nullopt) {
    const std::size_t n = values.size();
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("adf_test: non-finite value in series");
    }
    const double mean = n ? std::accumulate(values.begin(), values.end(), 0.0) / n : 0.0;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    if (n < 2 || var == 0.0) {
        throw std::invalid_argument("adf_test: series is constant; the test regression is degenerate");
    }

    int maxlag;
    if (max_lag) {
        maxlag = *max_lag;
        if (maxlag < 0) throw std::invalid_argument("adf_test: max_lag must be non-negative");
    } else {
        maxlag = static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
        maxlag = std::min<int>(maxlag, static_cast<int>(n) / 2 - 2);
        if (maxlag < 0) maxlag = 0;
    }
    if (n <= static_cast<std::size_t>(maxlag) + 10) {
        throw std::invalid_argument("adf_test: series too short for requested lag order");
    }

    // Lag selection on the common sample trimmed at maxlag: regress the
    // differenced series on [constant, level] plus an expanding block of
    // delta-lags and keep the AIC minimizer.
    int best_lag = 0;
    {
        Eigen::VectorXd dy;
        const Eigen::MatrixXd full = detail::adf_design(values, maxlag, dy);
        const Eigen::Index rows = full.rows();
        double best_aic = std::numeric_limits<double>::infinity();
        for (int lag = 0; lag <= maxlag; ++lag) {
            Eigen::MatrixXd x(rows, lag + 2);
            x.col(0) = full.col(full.cols() - 1);                   // constant
            x.block(0, 1, rows, lag + 1) = full.leftCols(lag + 1);  // level + delta-lags
            const detail::OlsFit fit = detail::ols(dy, x);
            const double aic = detail::ols_aic(fit);
            if (aic < best_aic) {
                best_aic = aic;
                best_lag = lag;
            }
        }
    }

    Eigen::VectorXd dy;
    const Eigen::MatrixXd x = detail::adf_design(values, best_lag, dy);
    const detail::OlsFit fit = detail::ols(dy, x);

    AdfResult result;
    result.statistic = fit.tvalues[0];
    result.used_lags = best_lag;
    result.n_obs = static_cast<int>(x.rows());
    result.p_value = detail::mackinnon_pvalue(result.statistic);
    result.critical_values = detail::mackinnon_crit(result.n_obs);
    return result;
}

inline AdfResult adf_test(const TimeSeries& series, std::optional<int> max_lag = std::nullopt) {
    return adf_test(series.values, max_lag);
}

/// Sample correlations by lag; values[k] is the correlation at lag k.
struct CorrelationSequence {
    std::vector<double> values;

    std::size_t n_lags() const { return values.empty() ? 0 : values.size() - 1; }
};

/// Sample autocorrelation with the biased (divisor n) covariance
/// normalization; lag 0 is exactly 1.
inline CorrelationSequence acf(const std::vector<double>& values, std::size_t n_lags) {
    const std::size_t n = values.size();
    if (n_lags >= n) throw std::invalid_argument("acf: n_lags must be smaller than series length");
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double c0 = 0.0;
    for (double v : values) c0 += (v - mean) * (v - mean);
    c0 /= static_cast<double>(n);
    if (c0 == 0.0) throw std::invalid_argument("acf: series has zero variance");

    CorrelationSequence seq;
    seq.values.resize(n_lags + 1);
    seq.values[0] = 1.0;
    for (std::size_t k = 1; k <= n_lags; ++k) {
        double ck = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) ck += (values[t] - mean) * (values[t + k] - mean);
        ck /= static_cast<double>(n);
        seq.values[k] = ck / c0;
    }
    return seq;
}

inline CorrelationSequence acf(const TimeSeries& series, std::size_t n_lags) {
    return acf(series.values, n_lags);
}

/// Partial autocorrelation via the Durbin-Levinson recursion on the sample
/// ACF; pacf(1) equals acf(1) by the base case.
inline CorrelationSequence pacf(const std::vector<double>& values, std::size_t n_lags) {
    if (n_lags >= values.size() / 2) {
        throw std::invalid_argument("pacf: n_lags must be smaller than half the series length");
    }
    const CorrelationSequence r = acf(values, n_lags);

    CorrelationSequence seq;
    seq.values.resize(n_lags + 1);
    seq.values[0] = 1.0;
    if (n_lags == 0) return seq;

    std::vector<double> phi(n_lags + 1, 0.0), prev(n_lags + 1, 0.0);
    phi[1] = r.values[1];
    seq.values[1] = phi[1];
    for (std::size_t k = 2; k <= n_lags; ++k) {
        prev = phi;
        double num = r.values[k];
        double den = 1.0;
        for (std::size_t j = 1; j < k; ++j) {
            num -= prev[j] * r.values[k - j];
            den -= prev[j] * r.values[j];
        }
        phi[k] = num / den;
        for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - phi[k] * prev[k - j];
        seq.values[k] = phi[k];
    }
    return seq;
}

inline CorrelationSequence pacf(const TimeSeries& series, std::size_t n_lags) {
    return pacf(series.values, n_lags);
}

/// Classical additive decomposition: original = trend + seasonal + residual.
/// Trend and residual carry NaN at the edges where the centered window does
/// not fit; seasonal is exactly periodic and centered to zero mean over one
/// period.
struct Decomposition {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> residual;
    std::size_t period = 0;
};

/// Classical decomposition with a centered moving-average trend. Even windows
/// use the standard half-weight endpoints (a 2×period average); the seasonal
/// component is the per-phase mean of the detrended values, re-centered so one
/// period sums to zero.
inline Decomposition decompose_additive(const std::vector<double>& values, std::size_t period) {
    const std::size_t n = values.size();
    if (period < 2) throw std::invalid_argument("decompose_additive: period must be at least 2");
    if (n < 2 * period) {
        throw std::invalid_argument("decompose_additive: need at least two full periods of data");
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();

    Decomposition d;
    d.period = period;
    d.trend.assign(n, nan);
    const std::size_t half = period / 2;
    if (period % 2 == 0) {
        for (std::size_t t = half; t + half < n; ++t) {
            double sum = 0.5 * values[t - half] + 0.5 * values[t + half];
            for (std::size_t j = t - half + 1; j < t + half; ++j) sum += values[j];
            d.trend[t] = sum / static_cast<double>(period);
        }
    } else {
        for (std::size_t t = half; t + half < n; ++t) {
            double sum = 0.0;
            for (std::size_t j = t - half; j <= t + half; ++j) sum += values[j];
            d.trend[t] = sum / static_cast<double>(period);
        }
    }

    std::vector<double> phase_sum(period, 0.0);
    std::vector<std::size_t> phase_count(period, 0);
    for (std::size_t t = 0; t < n; ++t) {
        if (std::isnan(d.trend[t])) continue;
        phase_sum[t % period] += values[t] - d.trend[t];
        ++phase_count[t % period];
    }
    std::vector<double> phase_mean(period, 0.0);
    double grand = 0.0;
    for (std::size_t p = 0; p < period; ++p) {
        if (phase_count[p] == 0) {
            throw std::invalid_argument("decompose_additive: a seasonal phase has no interior samples");
        }
        phase_mean[p] = phase_sum[p] / static_cast<double>(phase_count[p]);
        grand += phase_mean[p];
    }
    grand /= static_cast<double>(period);
    for (std::size_t p = 0; p < period; ++p) phase_mean[p] -= grand;

    d.seasonal.resize(n);
    d.residual.assign(n, nan);
    for (std::size_t t = 0; t < n; ++t) {
        d.seasonal[t] = phase_mean[t % period];
        if (!std::isnan(d.trend[t])) d.residual[t] = values[t] - d.trend[t] - d.seasonal[t];
    }
    return d;
}

inline Decomposition decompose_additive(const TimeSeries& series, std::size_t period) {
    return decompose_additive(series.values, period);
}

}  // namespace rollcast
