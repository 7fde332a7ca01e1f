#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rollcast/lag_polynomial.hpp"

namespace rollcast {

/// Linear-Gaussian state-space form of an ARMA process (Harvey companion
/// representation):
///   state:       alpha_{t+1} = T·alpha_t + R·eta_{t+1},  eta ~ N(0, sigma2)
///   observation: y_t = Z·alpha_t                          (no measurement noise)
/// with state dimension r = max(p, q+1).
struct StateSpaceModel {
    Eigen::MatrixXd transition;     // T, r x r
    Eigen::RowVectorXd design;      // Z, 1 x r
    Eigen::VectorXd state_loading;  // R, r x 1
    double innovation_variance = 1.0;
    int state_dim = 0;

    Eigen::MatrixXd state_noise_cov() const {
        return innovation_variance * (state_loading * state_loading.transpose());
    }
};

/// Kalman filter state after processing observation t (filtered, not
/// predicted, quantities). Once the covariance recursion reaches its steady
/// state the gain and innovation variance are frozen and reused, which turns
/// each subsequent step into a cheap mean update.
struct FilterState {
    Eigen::VectorXd state_mean;  // E[alpha_t | y_1..y_t]
    Eigen::MatrixXd state_cov;   // Var[alpha_t | y_1..y_t]
    double loglik_accum = 0.0;
    std::int64_t t = 0;
    bool steady = false;
    bool broken = false;           // filter hit a non-positive or non-finite variance
    Eigen::VectorXd steady_gain;   // cached K when steady
    double steady_innovation_var = 0.0;
};

/// Builds the Harvey companion form for the ARMA process
///   (1 − c1·L − …)·y_t = (1 + t1·L + …)·eps_t,  Var(eps) = sigma2.
/// Empty polynomials are allowed (white noise has r = 1).
inline StateSpaceModel build_arma_ssm(const LagPolynomial& ar_poly, const LagPolynomial& ma_poly,
                                      double sigma2) {
    if (ar_poly.kind != LagKind::ar || ma_poly.kind != LagKind::ma) {
        throw std::invalid_argument("build_arma_ssm: polynomial conventions are swapped");
    }
    ar_poly.check_finite("build_arma_ssm");
    ma_poly.check_finite("build_arma_ssm");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw std::invalid_argument("build_arma_ssm: innovation variance must be positive");
    }

    const std::size_t p = ar_poly.degree();
    const std::size_t q = ma_poly.degree();
    const int r = static_cast<int>(std::max(p, q + 1));

    StateSpaceModel model;
    model.state_dim = r;
    model.innovation_variance = sigma2;
    model.transition = Eigen::MatrixXd::Zero(r, r);
    for (std::size_t i = 0; i < p; ++i) {
        model.transition(static_cast<Eigen::Index>(i), 0) = ar_poly.coefficients[i];
    }
    for (int i = 0; i + 1 < r; ++i) model.transition(i, i + 1) = 1.0;
    model.design = Eigen::RowVectorXd::Zero(r);
    model.design(0) = 1.0;
    model.state_loading = Eigen::VectorXd::Zero(r);
    model.state_loading(0) = 1.0;
    for (std::size_t i = 0; i < q; ++i) {
        model.state_loading(static_cast<Eigen::Index>(i) + 1) = ma_poly.coefficients[i];
    }
    return model;
}

/// Solves the discrete Lyapunov equation X = A·X·Aᵀ + Q by doubling
/// (X accumulates sum A^j Q A^jᵀ with the exponent doubling each pass).
/// Converges whenever the spectral radius of A is below one; divergence is
/// reported as an exception since it means the process is not stationary.
inline Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
    Eigen::MatrixXd x = q;
    Eigen::MatrixXd apow = a;
    for (int iter = 0; iter < 120; ++iter) {
        const Eigen::MatrixXd next = x + apow * x * apow.transpose();
        if (!next.allFinite()) {
            throw std::invalid_argument("solve_lyapunov: divergence; transition is not stationary");
        }
        const double delta = (next - x).cwiseAbs().maxCoeff();
        x = next;
        apow = (apow * apow).eval();
        if (delta <= 1e-14 * (1.0 + x.cwiseAbs().maxCoeff()) ||
            apow.cwiseAbs().maxCoeff() < 1e-300) {
            return 0.5 * (x + x.transpose());
        }
    }
    throw std::invalid_argument("solve_lyapunov: no convergence; transition is not stationary");
}

/// Exact (stationary) initialization: zero state mean, unconditional state
/// covariance from the Lyapunov equation. Throws when the transition is not
/// stationary.
inline FilterState init_filter_state(const StateSpaceModel& model) {
    FilterState state;
    state.state_mean = Eigen::VectorXd::Zero(model.state_dim);
    state.state_cov = solve_lyapunov(model.transition, model.state_noise_cov());
    return state;
}

namespace detail {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
constexpr double kSteadyTol = 1e-13;

}  // namespace detail

/// Advances the filter by one observation: predict, update (Joseph-form
/// covariance), accumulate the exact Gaussian log-likelihood term. On a
/// non-positive or non-finite innovation variance the state is marked broken
/// and the accumulated log-likelihood becomes −inf.
inline void kalman_step(const StateSpaceModel& model, FilterState& state, double y) {
    if (state.broken) return;

    if (state.steady) {
        const Eigen::VectorXd a_pred = model.transition * state.state_mean;
        const double v = y - model.design.dot(a_pred);
        const double f = state.steady_innovation_var;
        state.state_mean = a_pred + state.steady_gain * v;
        state.loglik_accum -= 0.5 * (detail::kLog2Pi + std::log(f) + v * v / f);
        ++state.t;
        return;
    }

    const Eigen::VectorXd a_pred = model.transition * state.state_mean;
    Eigen::MatrixXd p_pred = model.transition * state.state_cov * model.transition.transpose() +
                             model.state_noise_cov();
    p_pred = 0.5 * (p_pred + p_pred.transpose()).eval();

    const double v = y - model.design.dot(a_pred);
    const Eigen::VectorXd pz = p_pred * model.design.transpose();
    const double f = model.design.dot(pz);
    if (!(f > 0.0) || !std::isfinite(f) || !std::isfinite(v)) {
        state.broken = true;
        state.loglik_accum = -std::numeric_limits<double>::infinity();
        return;
    }

    const Eigen::VectorXd gain = pz / f;
    const Eigen::MatrixXd ikz =
        Eigen::MatrixXd::Identity(model.state_dim, model.state_dim) - gain * model.design;
    Eigen::MatrixXd p_filt = ikz * p_pred * ikz.transpose();
    p_filt = 0.5 * (p_filt + p_filt.transpose()).eval();

    const double delta = (p_filt - state.state_cov).cwiseAbs().maxCoeff();
    const double scale = 1.0 + p_filt.cwiseAbs().maxCoeff();
    if (state.t > 0 && delta < detail::kSteadyTol * scale) {
        state.steady = true;
        state.steady_gain = gain;
        state.steady_innovation_var = f;
    }

    state.state_mean = a_pred + gain * v;
    state.state_cov = p_filt;
    state.loglik_accum -= 0.5 * (detail::kLog2Pi + std::log(f) + v * v / f);
    ++state.t;
}

/// One-step-ahead predictive mean of the next observation given the current
/// filtered state (used by the rolling harness to forecast before observing).
inline double one_step_mean(const StateSpaceModel& model, const FilterState& state) {
    return model.design.dot(model.transition * state.state_mean);
}

/// Filters a whole series from the stationary initialization; returns the
/// terminal filtered state carrying the accumulated log-likelihood.
inline FilterState kalman_filter(const StateSpaceModel& model, const std::vector<double>& data) {
    FilterState state = init_filter_state(model);
    for (double y : data) kalman_step(model, state, y);
    return state;
}

/// Exact Gaussian log-likelihood of the data under the model; −inf signals a
/// filter breakdown (the optimizer treats it as an infeasible point).
inline double kalman_loglik(const StateSpaceModel& model, const std::vector<double>& data) {
    if (data.empty()) throw std::invalid_argument("kalman_loglik: empty data");
    for (double y : data) {
        if (!std::isfinite(y)) throw std::invalid_argument("kalman_loglik: non-finite observation");
    }
    return kalman_filter(model, data).loglik_accum;
}

struct ForecastPoint {
    double mean = 0.0;
    double variance = 0.0;
};

/// h-step-ahead predictive means and variances obtained by iterating the
/// transition from the terminal filtered state. Horizon 0 yields an empty
/// sequence.
inline std::vector<ForecastPoint> kalman_forecast(const StateSpaceModel& model,
                                                  const FilterState& terminal,
                                                  std::size_t horizon) {
    std::vector<ForecastPoint> points;
    points.reserve(horizon);
    Eigen::VectorXd a = terminal.state_mean;
    Eigen::MatrixXd p = terminal.state_cov;
    const Eigen::MatrixXd q = model.state_noise_cov();
    for (std::size_t h = 0; h < horizon; ++h) {
        a = (model.transition * a).eval();
        p = (model.transition * p * model.transition.transpose() + q).eval();
        p = 0.5 * (p + p.transpose()).eval();
        points.push_back({model.design.dot(a), model.design.dot(p * model.design.transpose())});
    }
    return points;
}

/// Result of filtering several series through one shared model: the per-step
/// innovations of every column plus the common innovation variances. The
/// covariance recursion is data-independent, so k series cost little more
/// than one — this is what makes generalized-least-squares estimation of
/// regression coefficients cheap inside the likelihood.
struct InnovationsRun {
    Eigen::MatrixXd innovations;  // n x k
    Eigen::VectorXd variances;    // n
    bool ok = true;
};

inline InnovationsRun kalman_innovations(const StateSpaceModel& model,
                                         const Eigen::MatrixXd& columns) {
    const Eigen::Index n = columns.rows();
    const Eigen::Index k = columns.cols();
    InnovationsRun run;
    run.innovations.resize(n, k);
    run.variances.resize(n);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(model.state_dim, k);
    Eigen::MatrixXd p = solve_lyapunov(model.transition, model.state_noise_cov());
    bool steady = false;
    Eigen::VectorXd gain;
    double f = 0.0;
    const Eigen::MatrixXd q = model.state_noise_cov();

    for (Eigen::Index t = 0; t < n; ++t) {
        a = (model.transition * a).eval();
        if (!steady) {
            Eigen::MatrixXd p_pred = model.transition * p * model.transition.transpose() + q;
            p_pred = 0.5 * (p_pred + p_pred.transpose()).eval();
            const Eigen::VectorXd pz = p_pred * model.design.transpose();
            f = model.design.dot(pz);
            if (!(f > 0.0) || !std::isfinite(f)) {
                run.ok = false;
                return run;
            }
            gain = pz / f;
            const Eigen::MatrixXd ikz =
                Eigen::MatrixXd::Identity(model.state_dim, model.state_dim) - gain * model.design;
            Eigen::MatrixXd p_filt = ikz * p_pred * ikz.transpose();
            p_filt = 0.5 * (p_filt + p_filt.transpose()).eval();
            if (t > 0 && (p_filt - p).cwiseAbs().maxCoeff() <
                             detail::kSteadyTol * (1.0 + p_filt.cwiseAbs().maxCoeff())) {
                steady = true;
            }
            p = p_filt;
        }
        const Eigen::RowVectorXd v = columns.row(t) - model.design * a;
        if (!v.allFinite()) {
            run.ok = false;
            return run;
        }
        run.innovations.row(t) = v;
        run.variances(t) = f;
        a.noalias() += gain * v;
    }
    return run;
}

}  // namespace rollcast
