#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace rollcast {

/// Which side of the model a lag polynomial belongs to. The stored
/// coefficients c1..ck mean
///   ar: 1 − c1·L − … − ck·L^k   (autoregressive convention)
///   ma: 1 + c1·L + … + ck·L^k   (moving-average convention)
enum class LagKind { ar, ma };

struct LagPolynomial {
    std::vector<double> coefficients;
    LagKind kind = LagKind::ar;

    std::size_t degree() const { return coefficients.size(); }

    /// Full coefficient sequence f0..fk of the polynomial in L with the
    /// convention sign folded in: f0 = 1, f_i = −c_i (ar) or +c_i (ma).
    std::vector<double> full() const {
        std::vector<double> f(coefficients.size() + 1);
        f[0] = 1.0;
        const double sign = (kind == LagKind::ar) ? -1.0 : 1.0;
        for (std::size_t i = 0; i < coefficients.size(); ++i) f[i + 1] = sign * coefficients[i];
        return f;
    }

    void check_finite(const char* what) const {
        for (double c : coefficients) {
            if (!std::isfinite(c)) {
                throw std::invalid_argument(std::string(what) + ": non-finite lag coefficient");
            }
        }
    }
};

/// Product of a nonseasonal polynomial in L and a seasonal polynomial in L^S,
/// returned in the shared convention. Degree is additive: deg = k + K·S.
/// An empty seasonal factor acts as the identity.
inline LagPolynomial expand_polynomials(const LagPolynomial& nonseasonal,
                                        const LagPolynomial& seasonal, int season_length) {
    if (nonseasonal.kind != seasonal.kind) {
        throw std::invalid_argument("expand_polynomials: mixed polynomial conventions");
    }
    nonseasonal.check_finite("expand_polynomials");
    seasonal.check_finite("expand_polynomials");
    if (!seasonal.coefficients.empty() && season_length < 2) {
        throw std::invalid_argument("expand_polynomials: seasonal factor needs season_length >= 2");
    }

    const std::vector<double> a = nonseasonal.full();
    const std::vector<double> b = seasonal.full();
    const std::size_t s = static_cast<std::size_t>(season_length > 0 ? season_length : 1);
    std::vector<double> prod(a.size() + (b.size() - 1) * s, 0.0);
    for (std::size_t j = 0; j < b.size(); ++j) {
        for (std::size_t i = 0; i < a.size(); ++i) prod[i + j * s] += a[i] * b[j];
    }

    LagPolynomial out;
    out.kind = nonseasonal.kind;
    const double sign = (out.kind == LagKind::ar) ? -1.0 : 1.0;
    out.coefficients.resize(prod.size() - 1);
    for (std::size_t i = 1; i < prod.size(); ++i) out.coefficients[i - 1] = sign * prod[i];
    return out;
}

/// True when every root of the polynomial lies strictly outside the unit
/// circle — stationarity for an ar polynomial, invertibility for an ma one.
/// Checked through the companion matrix of the reversed polynomial, whose
/// eigenvalues are the reciprocal roots.
inline bool polynomial_is_stable(const LagPolynomial& poly) {
    poly.check_finite("polynomial_is_stable");
    const std::size_t k = poly.degree();
    if (k == 0) return true;
    const std::vector<double> f = poly.full();
    const Eigen::Index n = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) companion(0, j) = -f[static_cast<std::size_t>(j) + 1];
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff() < 1.0;
}

/// Scalar maps between an unconstrained real and a partial autocorrelation in
/// (−1, 1). Smooth, strictly increasing, and overflow-free.
inline double partial_from_unconstrained(double z) { return z / std::sqrt(1.0 + z * z); }

inline double unconstrained_from_partial(double r) {
    if (!(r > -1.0 && r < 1.0)) {
        throw std::invalid_argument("unconstrained_from_partial: partial outside (-1,1)");
    }
    return r / std::sqrt(1.0 - r * r);
}

/// Levinson–Durbin expansion: maps partial autocorrelations r1..rk in (−1,1)
/// to coefficients c1..ck of a stable ar-convention polynomial. The map is a
/// bijection onto the stationary region, which is what lets the optimizer
/// roam an unconstrained space without ever producing an explosive model.
inline std::vector<double> pacf_to_ar(const std::vector<double>& partials) {
    std::vector<double> a(partials);
    const std::size_t k = a.size();
    std::vector<double> prev;
    for (std::size_t j = 1; j < k; ++j) {
        const double pj = partials[j];
        prev.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(j));
        for (std::size_t i = 0; i < j; ++i) a[i] = prev[i] - pj * prev[j - 1 - i];
    }
    return a;
}

/// Inverse Levinson–Durbin recursion: recovers the partial autocorrelations
/// from stable ar-convention coefficients. Throws when the polynomial is not
/// strictly stationary (some |partial| would reach 1).
inline std::vector<double> ar_to_pacf(const std::vector<double>& coefficients) {
    std::vector<double> a(coefficients);
    const std::size_t k = a.size();
    std::vector<double> partials(k, 0.0);
    std::vector<double> cur;
    for (std::size_t j = k; j-- > 1;) {
        const double pj = a[j];
        if (!(pj > -1.0 && pj < 1.0)) {
            throw std::invalid_argument("ar_to_pacf: polynomial is not stationary");
        }
        partials[j] = pj;
        cur.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(j));
        const double denom = 1.0 - pj * pj;
        for (std::size_t i = 0; i < j; ++i) a[i] = (cur[i] + pj * cur[j - 1 - i]) / denom;
    }
    if (k > 0) {
        if (!(a[0] > -1.0 && a[0] < 1.0)) {
            throw std::invalid_argument("ar_to_pacf: polynomial is not stationary");
        }
        partials[0] = a[0];
    }
    return partials;
}

}  // namespace rollcast
