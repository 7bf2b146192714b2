#pragma once

// Plain Lasso by coordinate descent and the scaled Lasso.
//
// Penalty convention: `lam` is the objective-scale penalty in
//     (1/2) ||y - X beta||^2 + lam * sum_j w_j |beta_j|.
// With columns of norm sqrt(n) the coordinate update is
//     beta_j = (1/n) (|z_j| - lam w_j)_+ sign(z_j),  z_j = x_j' r + n beta_j,
// i.e. the per-coordinate threshold on beta is lam / n. The spike-and-slab
// update uses the same convention, with lam = sigma^2 lambda*.

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "sslvar/core/dataset.hpp"
#include "sslvar/core/errors.hpp"

namespace sslvar::baselines {

struct LassoFit {
    Coefficients coef;
    int sweeps = 0;
    bool converged = false;
    std::vector<double> objective_trace; // after each sweep, when requested
};

inline double weighted_lasso_objective(const Dataset& data, const Vector& beta, const Vector& weights, double lam) {
    return 0.5 * residual_ss(data.x, data.y, beta) + lam * weights.cwiseProduct(beta.cwiseAbs()).sum();
}

/// Coordinate descent for (1/2)||y - X beta||^2 + lam sum_j w_j |beta_j|.
/// Stops once a sweep moves no coordinate by more than tol / n and the KKT
/// conditions then hold within tol on the gradient scale. `sweeps` and max_iter
/// count full passes; active-set passes in between are not counted.
inline LassoFit weighted_lasso_cd(const Dataset& data, const Vector& weights, double lam, double tol = 1e-7,
                                  int max_iter = 10000, const Vector* warm_start = nullptr,
                                  bool record_objective = false) {
    const Index p = data.p();
    const double nn = static_cast<double>(data.n());
    if (weights.size() != p) throw DimensionMismatch("weighted_lasso_cd: weight length differs from p");
    if (lam < 0.0 || (weights.array() < 0.0).any()) throw DomainError("lasso penalties must be non-negative");

    LassoFit fit;
    Vector beta = warm_start ? *warm_start : Vector::Zero(p);
    if (beta.size() != p) throw DimensionMismatch("warm start length differs from p");
    Vector residual = data.y - data.x * beta;
    const Vector thresholds = lam * weights;

    const auto update = [&](Index j) {
        const double old = beta[j];
        const double z = data.x.col(j).dot(residual) + nn * old;
        const double shrunk = std::abs(z) - thresholds[j];
        const double updated = shrunk > 0.0 ? std::copysign(shrunk, z) / nn : 0.0;
        if (updated == old) return 0.0;
        residual.noalias() -= (updated - old) * data.x.col(j);
        beta[j] = updated;
        return std::abs(updated - old);
    };
    std::vector<Index> active;

    while (fit.sweeps < max_iter) {
        ++fit.sweeps;
        double max_step = 0.0;
        for (Index j = 0; j < p; ++j) max_step = std::max(max_step, update(j));
        if (record_objective) fit.objective_trace.push_back(weighted_lasso_objective(data, beta, weights, lam));
        if (max_step * nn > tol) {
            // Cycle over the current support until it settles, then rescan all coordinates.
            active.clear();
            for (Index j = 0; j < p; ++j)
                if (beta[j] != 0.0) active.push_back(j);
            for (int inner = 0; inner < max_iter; ++inner) {
                double step = 0.0;
                for (const Index j : active) step = std::max(step, update(j));
                if (record_objective)
                    fit.objective_trace.push_back(weighted_lasso_objective(data, beta, weights, lam));
                if (step * nn <= tol) break;
            }
            continue;
        }

        bool kkt_ok = true;
        for (Index j = 0; j < p && kkt_ok; ++j) {
            const double grad = data.x.col(j).dot(residual);
            if (beta[j] == 0.0)
                kkt_ok = std::abs(grad) <= thresholds[j] + tol;
            else
                kkt_ok = std::abs(grad - std::copysign(thresholds[j], beta[j])) <= tol;
        }
        if (kkt_ok) {
            fit.converged = true;
            break;
        }
    }
    fit.coef = Coefficients(std::move(beta));
    if (!fit.converged) throw DidNotConverge<LassoFit>("lasso coordinate descent hit max_iter", std::move(fit));
    return fit;
}

inline LassoFit lasso_cd(const Dataset& data, double lam, double tol = 1e-7, int max_iter = 10000,
                         const Vector* warm_start = nullptr, bool record_objective = false) {
    if (!data.standardized) throw NotStandardized();
    return weighted_lasso_cd(data, Vector::Ones(data.p()), lam, tol, max_iter, warm_start, record_objective);
}

/// Smallest objective-scale penalty giving the all-zero solution.
inline double lasso_lambda_max(const Dataset& data) { return (data.x.transpose() * data.y).cwiseAbs().maxCoeff(); }

/// Log-spaced grid from lambda_max down to ratio * lambda_max.
inline std::vector<double> lasso_lambda_grid(const Dataset& data, int count = 100, double ratio = 0.01) {
    const double top = lasso_lambda_max(data);
    std::vector<double> grid;
    for (int i = 0; i < count; ++i)
        grid.push_back(top * std::pow(ratio, static_cast<double>(i) / static_cast<double>(count - 1)));
    return grid;
}

/// Warm-started path over a decreasing penalty grid.
inline std::vector<Coefficients> lasso_path(const Dataset& data, const std::vector<double>& lambdas,
                                            double tol = 1e-7, int max_iter = 10000) {
    std::vector<Coefficients> path;
    Vector warm = Vector::Zero(data.p());
    for (const double lam : lambdas) {
        LassoFit fit = lasso_cd(data, lam, tol, max_iter, &warm);
        warm = fit.coef.beta;
        path.push_back(std::move(fit.coef));
    }
    return path;
}

/// Standard normal quantile Phi^{-1}(1 - t), accurate in the upper tail.
inline double upper_normal_quantile(double t) {
    return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<double>(), t));
}

/// lambda0 = sqrt(2) L_n(k/p), with L_n(t) = Phi^{-1}(1-t)/sqrt(n) and k the root
/// of k = L_1^4(k/p) + 2 L_1^2(k/p) on (0, p/2).
inline double universal_lambda0(long n, long p) {
    if (p < 2 || n < 1) throw DomainError("universal_lambda0 needs p >= 2 and n >= 1");
    const double pp = static_cast<double>(p);
    const auto excess = [pp](double k) {
        const double l = upper_normal_quantile(k / pp);
        return k - l * l * l * l - 2.0 * l * l;
    };
    double lo = 1e-300 * pp;
    double hi = pp / 2.0;
    if (!(excess(lo) < 0.0 && excess(hi) > 0.0)) throw NoConvergence("universal_lambda0: root not bracketed");
    int iterations = 0;
    while (hi - lo > 1e-15 * hi) {
        if (++iterations > 1000) throw NoConvergence("universal_lambda0: bisection did not settle");
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    const double k = 0.5 * (lo + hi);
    return std::sqrt(2.0) * upper_normal_quantile(k / pp) / std::sqrt(static_cast<double>(n));
}

/// The simpler rate A sqrt(2 log(p) / n), A > 1.
inline double sqrt_log_lambda0(long n, long p, double a = 1.1) {
    return a * std::sqrt(2.0 * std::log(static_cast<double>(p)) / static_cast<double>(n));
}

struct ScaledLassoFit {
    Coefficients beta;
    double sigma_hat = 0.0;
    double lambda0 = 0.0;
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;        // sigma hit its floor
    std::vector<double> loss_trace; // joint loss after each alternation
};

/// ||y - X beta||^2 / (2 sigma) + n sigma / 2 + n lambda0 ||beta||_1.
inline double scaled_lasso_loss(const Dataset& data, const Vector& beta, double sigma, double lambda0) {
    const double nn = static_cast<double>(data.n());
    return residual_ss(data.x, data.y, beta) / (2.0 * sigma) + nn * sigma / 2.0 + nn * lambda0 * beta.lpNorm<1>();
}

/// Alternates the Lasso step at penalty n sigma lambda0 with sigma = ||r|| / sqrt(n).
inline ScaledLassoFit scaled_lasso(const Dataset& data, double lambda0, double tol = 1e-6, int max_iter = 100) {
    if (!data.standardized) throw NotStandardized();
    if (!(lambda0 > 0.0)) throw DomainError("scaled_lasso: lambda0 must be positive");
    const double nn = static_cast<double>(data.n());
    const double sd_y = std::sqrt(sample_variance(data.y));
    const double floor = 1e-8 * sd_y;

    ScaledLassoFit fit;
    fit.lambda0 = lambda0;
    Vector beta = Vector::Zero(data.p());
    double sigma = std::max(floor, data.y.norm() / std::sqrt(nn));
    while (fit.iterations < max_iter) {
        ++fit.iterations;
        beta = lasso_cd(data, nn * sigma * lambda0, 1e-9, 100000, &beta).coef.beta;
        double next = residual_ss(data.x, data.y, beta);
        next = std::sqrt(next / nn);
        if (next <= floor) {
            next = floor;
            fit.degenerate = true;
        }
        fit.loss_trace.push_back(scaled_lasso_loss(data, beta, next, lambda0));
        const double change = std::abs(next - sigma);
        sigma = next;
        if (change < tol) {
            fit.converged = true;
            break;
        }
    }
    fit.beta = Coefficients(std::move(beta));
    fit.sigma_hat = sigma;
    if (!fit.converged) throw DidNotConverge<ScaledLassoFit>("scaled lasso did not converge", std::move(fit));
    return fit;
}

/// ||y - X beta*||^2 / n.
inline double oracle_sigma2(const Dataset& data, const Vector& beta_true) {
    if (beta_true.size() != data.p()) throw DimensionMismatch("oracle_sigma2: beta length differs from p");
    return residual_ss(data.x, data.y, beta_true) / static_cast<double>(data.n());
}

} // namespace sslvar::baselines
