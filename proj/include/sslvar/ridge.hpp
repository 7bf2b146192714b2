#pragma once

// Bayesian ridge estimators: least squares with the Jeffreys-style variance,
// the conjugate ridge posterior means, Zellner's g-prior, and a Gibbs sampler
// for the independence prior beta ~ N(0, tau^2 I), pi(sigma^2) ∝ sigma^{-2}.
// These work on the data as given (no standardization is imposed).

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "sslvar/core/csv.hpp"
#include "sslvar/core/dataset.hpp"
#include "sslvar/core/errors.hpp"
#include "sslvar/core/rng.hpp"

namespace sslvar::ridge {

enum class EstimatorKind { LeastSquares, ConjugateRidge, Zellner, IndependentGibbs };

inline const char* to_string(EstimatorKind kind) {
    switch (kind) {
    case EstimatorKind::LeastSquares: return "least_squares";
    case EstimatorKind::ConjugateRidge: return "conjugate_ridge";
    case EstimatorKind::Zellner: return "zellner";
    case EstimatorKind::IndependentGibbs: return "independent_gibbs";
    }
    return "unknown";
}

struct RidgeEstimates {
    Vector beta_mean;
    double sigma2_estimate = 0.0;
    EstimatorKind estimator_kind = EstimatorKind::LeastSquares;
    double tau2_or_g = 0.0; // 0 for least squares
};

namespace detail {

inline void check_finite(const Dataset& data) {
    if (!data.x.allFinite() || !data.y.allFinite()) throw NonFiniteInput();
}

// (X'X)^{-1} X'y, refusing rank-deficient designs.
inline Vector ls_solve(const Dataset& data) {
    Eigen::ColPivHouseholderQR<Matrix> qr(data.x);
    if (qr.rank() < data.p()) throw SingularDesign("design matrix is rank deficient");
    return qr.solve(data.y);
}

} // namespace detail

/// beta = (X'X)^{-1} X'y, sigma^2 = RSS / (n - p - 2).
inline RidgeEstimates least_squares(const Dataset& data) {
    detail::check_finite(data);
    if (data.n() <= data.p() + 2) throw InsufficientDof("least squares needs n > p + 2");
    RidgeEstimates est;
    est.beta_mean = detail::ls_solve(data);
    est.sigma2_estimate = residual_ss(data.x, data.y, est.beta_mean) / static_cast<double>(data.n() - data.p() - 2);
    est.estimator_kind = EstimatorKind::LeastSquares;
    return est;
}

/// beta = (X'X + tau^{-2} I)^{-1} X'y, sigma^2 = y'(I - H_tau) y / (n - 2).
inline RidgeEstimates conjugate_ridge(const Dataset& data, double tau2) {
    detail::check_finite(data);
    if (!(tau2 > 0.0)) throw DomainError("tau2 must be positive");
    if (data.n() <= 2) throw InsufficientDof("conjugate ridge needs n > 2");
    Matrix a = data.x.transpose() * data.x;
    a.diagonal().array() += 1.0 / tau2;
    const Vector xty = data.x.transpose() * data.y;
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw SingularDesign("regularized system is not positive definite");
    RidgeEstimates est;
    est.beta_mean = llt.solve(xty);
    // y'H y = (X'y)' beta
    est.sigma2_estimate = (data.y.squaredNorm() - xty.dot(est.beta_mean)) / static_cast<double>(data.n() - 2);
    est.estimator_kind = EstimatorKind::ConjugateRidge;
    est.tau2_or_g = tau2;
    return est;
}

/// beta = g/(1+g) beta_LS, sigma^2 = y'(I - H_g) y / (n - 2), H_g = g/(1+g) X (X'X)^{-1} X'.
inline RidgeEstimates zellner(const Dataset& data, double g) {
    detail::check_finite(data);
    if (!(g > 0.0)) throw DomainError("g must be positive");
    if (data.n() <= 2) throw InsufficientDof("zellner needs n > 2");
    const Vector ls = detail::ls_solve(data);
    const double shrink = g / (1.0 + g);
    RidgeEstimates est;
    est.beta_mean = shrink * ls;
    est.sigma2_estimate =
        (data.y.squaredNorm() - shrink * data.y.dot(data.x * ls)) / static_cast<double>(data.n() - 2);
    est.estimator_kind = EstimatorKind::Zellner;
    est.tau2_or_g = g;
    return est;
}

/// E[sigma^2 | y, beta] under the conjugate prior.
inline double conditional_sigma_conjugate(const Vector& beta, const Dataset& data, double tau2) {
    if (beta.size() != data.p()) throw DimensionMismatch("beta length differs from p");
    if (data.n() + data.p() <= 2) throw InsufficientDof("needs n + p > 2");
    return (residual_ss(data.x, data.y, beta) + beta.squaredNorm() / tau2) /
           static_cast<double>(data.n() + data.p() - 2);
}

/// E[sigma^2 | y, beta] under the independence prior.
inline double conditional_sigma_independent(const Vector& beta, const Dataset& data) {
    if (beta.size() != data.p()) throw DimensionMismatch("beta length differs from p");
    if (data.n() <= 2) throw InsufficientDof("needs n > 2");
    return residual_ss(data.x, data.y, beta) / static_cast<double>(data.n() - 2);
}

/// E[beta | sigma^2, y] = (X'X + (sigma^2 / tau^2) I)^{-1} X'y.
inline Vector conditional_beta_independent(const Dataset& data, double sigma2, double tau2) {
    if (!(sigma2 > 0.0) || !(tau2 > 0.0)) throw DomainError("sigma2 and tau2 must be positive");
    Matrix a = data.x.transpose() * data.x;
    a.diagonal().array() += sigma2 / tau2;
    return a.ldlt().solve(data.x.transpose() * data.y);
}

struct GibbsChain {
    Matrix beta_draws;   // iterations x p, burn-in included
    Vector sigma2_draws; // iterations
    int burn_in = 0;
    RngSpec rng;

    Index retained() const noexcept { return sigma2_draws.size() - burn_in; }
    Vector beta_mean() const { return beta_draws.bottomRows(retained()).colwise().mean().transpose(); }
    double sigma2_mean() const { return sigma2_draws.tail(retained()).mean(); }

    RidgeEstimates estimates(double tau2) const {
        return RidgeEstimates{beta_mean(), sigma2_mean(), EstimatorKind::IndependentGibbs, tau2};
    }

    /// One row per retained draw: sigma^2, then the beta entries.
    void write_csv(std::ostream& out) const {
        out << "sigma2";
        for (Index j = 0; j < beta_draws.cols(); ++j) out << ",beta_" << j;
        out << '\n';
        for (Index t = burn_in; t < sigma2_draws.size(); ++t) {
            out << csv::format_number(sigma2_draws[t]);
            for (Index j = 0; j < beta_draws.cols(); ++j) out << ',' << csv::format_number(beta_draws(t, j));
            out << '\n';
        }
    }
};

/// Alternates beta | sigma^2 ~ N(sigma^{-2} V X'y, V), V = (sigma^{-2} X'X + tau^{-2} I)^{-1},
/// and sigma^2 | beta ~ IG(n/2, RSS/2). Normal draws use the Cholesky factor of
/// the precision, recomputed every iteration. Starts from sigma^2 = var(y).
inline GibbsChain gibbs_independent_ridge(const Dataset& data, double tau2, int iterations = 5000, int burn_in = 1000,
                                          RngSpec rng_spec = {}) {
    detail::check_finite(data);
    if (!(tau2 > 0.0)) throw DomainError("tau2 must be positive");
    if (burn_in < 0 || iterations <= burn_in) throw DomainError("need iterations > burn_in >= 0");
    const Index p = data.p();
    const double half_n = static_cast<double>(data.n()) / 2.0;
    const Matrix xtx = data.x.transpose() * data.x;
    const Vector xty = data.x.transpose() * data.y;

    Rng rng(rng_spec, StreamPurpose::Sampler);
    GibbsChain chain;
    chain.beta_draws.resize(iterations, p);
    chain.sigma2_draws.resize(iterations);
    chain.burn_in = burn_in;
    chain.rng = rng_spec;

    double sigma2 = sample_variance(data.y);
    Matrix precision(p, p);
    for (int t = 0; t < iterations; ++t) {
        precision = xtx / sigma2;
        precision.diagonal().array() += 1.0 / tau2;
        const Eigen::LLT<Matrix> llt(precision);
        if (llt.info() != Eigen::Success) throw SingularDesign("posterior precision is not positive definite");
        const Vector mean = llt.solve(xty / sigma2);
        // precision = L L'  =>  L'^{-1} z ~ N(0, V)
        const Vector beta = mean + llt.matrixU().solve(rng.normal_vector(p));
        sigma2 = rng.inverse_gamma(half_n, residual_ss(data.x, data.y, beta) / 2.0);
        chain.beta_draws.row(t) = beta.transpose();
        chain.sigma2_draws[t] = sigma2;
    }
    return chain;
}

inline void write_chain_csv(const GibbsChain& chain, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    chain.write_csv(out);
}

} // namespace sslvar::ridge
