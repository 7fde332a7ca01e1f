#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace rollcast {

struct NelderMeadOptions {
    int max_iterations = 0;  // 0 selects 200 * dimension
    double f_tol = 1e-9;     // simplex function-value spread
    double x_tol = 1e-7;     // simplex coordinate spread
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double fval = 0.0;
    int iterations = 0;
    bool converged = false;     // tolerance reached (not iteration/deadline exhaustion)
    bool deadline_hit = false;
};

/// Classical Nelder–Mead simplex minimization (reflection 1, expansion 2,
/// contraction 0.5, shrink 0.5) with the conventional 5% initial perturbation
/// per coordinate. Deterministic for a given starting point; an optional
/// deadline lets a caller bound the wall time of one refinement.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                                    const Eigen::VectorXd& x0,
                                    const NelderMeadOptions& options = {}) {
    const int dim = static_cast<int>(x0.size());
    NelderMeadResult result;
    if (dim == 0) {
        result.x = x0;
        result.fval = objective(x0);
        result.converged = true;
        return result;
    }
    const int max_iter = options.max_iterations > 0 ? options.max_iterations : 200 * dim;

    std::vector<Eigen::VectorXd> simplex;
    simplex.reserve(dim + 1);
    simplex.push_back(x0);
    for (int i = 0; i < dim; ++i) {
        Eigen::VectorXd v = x0;
        v[i] = (v[i] != 0.0) ? 1.05 * v[i] : 0.00025;
        simplex.push_back(v);
    }
    std::vector<double> fvals(dim + 1);
    for (int i = 0; i <= dim; ++i) fvals[i] = objective(simplex[i]);

    std::vector<int> idx(dim + 1);
    for (int iter = 0; iter < max_iter; ++iter) {
        if (options.deadline && std::chrono::steady_clock::now() >= *options.deadline) {
            result.deadline_hit = true;
            break;
        }

        for (int i = 0; i <= dim; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fvals[a] < fvals[b]; });
        const int best = idx[0], worst = idx[dim], second_worst = idx[dim - 1];

        double f_spread = 0.0, x_spread = 0.0;
        for (int i = 1; i <= dim; ++i) {
            f_spread = std::max(f_spread, std::abs(fvals[idx[i]] - fvals[best]));
            x_spread = std::max(x_spread, (simplex[idx[i]] - simplex[best]).cwiseAbs().maxCoeff());
        }
        if (f_spread <= options.f_tol && x_spread <= options.x_tol) {
            result.converged = true;
            result.iterations = iter;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i <= dim; ++i) {
            if (i != worst) centroid += simplex[i];
        }
        centroid /= static_cast<double>(dim);

        const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
        const double f_reflected = objective(reflected);
        if (f_reflected < fvals[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
            const double f_expanded = objective(expanded);
            if (f_expanded < f_reflected) {
                simplex[worst] = expanded;
                fvals[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                fvals[worst] = f_reflected;
            }
        } else if (f_reflected < fvals[second_worst]) {
            simplex[worst] = reflected;
            fvals[worst] = f_reflected;
        } else {
            const bool outside = f_reflected < fvals[worst];
            Eigen::VectorXd contracted;
            if (outside) {
                contracted = centroid + 0.5 * (reflected - centroid);
            } else {
                contracted = centroid - 0.5 * (centroid - simplex[worst]);
            }
            const double f_contracted = objective(contracted);
            if (f_contracted < (outside ? f_reflected : fvals[worst])) {
                simplex[worst] = contracted;
                fvals[worst] = f_contracted;
            } else {
                for (int i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
                    fvals[i] = objective(simplex[i]);
                }
            }
        }
        result.iterations = iter + 1;
    }

    int best = 0;
    for (int i = 1; i <= dim; ++i) {
        if (fvals[i] < fvals[best]) best = i;
    }
    result.x = simplex[best];
    result.fval = fvals[best];
    return result;
}

}  // namespace rollcast
