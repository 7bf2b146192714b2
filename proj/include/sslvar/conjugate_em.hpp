#pragma once

// EM for the spike-and-slab Lasso under the conjugate prior, where both
// Laplace components scale with sigma:  beta_j | gamma_j, sigma ~ (lambda / 2 sigma) e^{-|beta_j| lambda / sigma},
// pi(sigma^2) ∝ sigma^{-2}, theta ~ Beta(a, b).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sslvar/baselines.hpp"
#include "sslvar/core/dataset.hpp"
#include "sslvar/core/errors.hpp"
#include "sslvar/ssl/penalty.hpp"

namespace sslvar::conj {

struct ConjEmConfig {
    double lambda0 = 20.0;
    double lambda1 = 1.0;
    double a = 1.0;
    double b = 1.0;
    double tol = 1e-6;  // max change over (beta, sigma, theta)
    int max_iter = 1000;
    double theta_init = 0.5;
    double sigma_init = 0.0; // <= 0: sample standard deviation of y

    static ConjEmConfig defaults_for(Index p) {
        ConjEmConfig c;
        c.b = static_cast<double>(p);
        return c;
    }

    void validate() const {
        if (!(lambda1 > 0.0) || !(lambda0 >= lambda1)) throw DomainError("conjugate EM needs lambda0 >= lambda1 > 0");
        if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta prior shapes a, b must be positive");
        if (!(tol > 0.0)) throw DomainError("tol must be positive");
        if (max_iter < 1) throw DomainError("max_iter must be >= 1");
        if (!(theta_init > 0.0 && theta_init < 1.0)) throw DomainError("theta_init must lie in (0,1)");
    }
};

struct ConjEmFit {
    Coefficients beta;
    double sigma_hat = 0.0;
    double theta_hat = 0.5;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace; // log posterior after each iteration
};

struct EStep {
    Vector pstar;
    Vector lambda_star;
};

/// p*(beta_j / sigma; theta) and lambda*(beta_j / sigma; theta).
inline EStep em_e_step(const Vector& beta, double sigma, double theta, const ConjEmConfig& config) {
    if (!(sigma > 0.0)) throw DomainError("em_e_step: sigma must be positive");
    EStep e{Vector(beta.size()), Vector(beta.size())};
    for (Index j = 0; j < beta.size(); ++j) {
        const double ps = ssl::p_star(beta[j] / sigma, theta, config.lambda0, config.lambda1);
        e.pstar[j] = ps;
        e.lambda_star[j] = config.lambda1 * ps + config.lambda0 * (1.0 - ps);
    }
    return e;
}

/// argmin (1/(2 sigma)) ||y - X beta||^2 + sum_j lambda*_j |beta_j|.
/// Multiplying through by sigma gives a weighted Lasso at penalty sigma.
inline Coefficients em_beta_step(const Dataset& data, double sigma, const Vector& lambda_star,
                                 const Vector* warm_start = nullptr) {
    if (!data.standardized) throw NotStandardized();
    if (!(sigma > 0.0)) throw DomainError("em_beta_step: sigma must be positive");
    return baselines::weighted_lasso_cd(data, lambda_star, sigma, 1e-8, 10000, warm_start).coef;
}

inline double em_theta_step(const Vector& pstar, double a, double b, Index p) {
    const double denom = a + b + static_cast<double>(p) - 2.0;
    if (!(denom > 0.0)) throw DomainError("em_theta_step needs a + b + p > 2");
    const double theta = (pstar.sum() + a - 1.0) / denom;
    return std::clamp(theta, 1e-12, 1.0 - 1e-12);
}

/// Positive root of (n+p+2) sigma^2 - q sigma - rss = 0.
inline double em_sigma_step(double residual_ss, double q, long n, long p) {
    if (residual_ss < 0.0) throw DomainError("em_sigma_step: negative residual sum of squares");
    const double m = static_cast<double>(n + p + 2);
    return (q + std::sqrt(q * q + 4.0 * residual_ss * m)) / (2.0 * m);
}

/// Observed log posterior (up to a constant) of (beta, sigma, theta).
inline double conj_log_posterior(const Dataset& data, const Vector& beta, double sigma, double theta,
                                 const ConjEmConfig& config) {
    const double n = static_cast<double>(data.n());
    const double l0 = config.lambda0, l1 = config.lambda1;
    double value = -residual_ss(data.x, data.y, beta) / (2.0 * sigma * sigma) - (n + 2.0) * std::log(sigma);
    const double slab = std::log(theta) + std::log(l1);
    const double spike = std::log1p(-theta) + std::log(l0);
    for (Index j = 0; j < beta.size(); ++j) {
        const double t = std::abs(beta[j]) / sigma;
        const double u = slab - t * l1, v = spike - t * l0;
        const double hi = std::max(u, v);
        value += hi + std::log1p(std::exp(std::min(u, v) - hi)) - std::log(2.0 * sigma);
    }
    return value + (config.a - 1.0) * std::log(theta) + (config.b - 1.0) * std::log1p(-theta);
}

/// Runs EM from beta_start (zero when null). The sigma update uses the new
/// beta (an ECM step), which keeps the observed posterior nondecreasing.
inline ConjEmFit run_conj_em(const Dataset& data, const ConjEmConfig& config, const Vector* beta_start = nullptr,
                             std::optional<double> sigma_start = std::nullopt) {
    if (!data.standardized) throw NotStandardized();
    config.validate();
    const Index p = data.p();
    const long n = static_cast<long>(data.n());

    Vector beta = beta_start ? *beta_start : Vector::Zero(p);
    if (beta.size() != p) throw DimensionMismatch("run_conj_em: start length differs from p");
    double sigma = sigma_start ? *sigma_start
                   : config.sigma_init > 0.0 ? config.sigma_init
                                             : std::sqrt(sample_variance(data.y));
    if (!(sigma > 0.0)) throw DomainError("run_conj_em: initial sigma must be positive");
    double theta = config.theta_init;

    ConjEmFit fit;
    while (fit.iterations < config.max_iter) {
        ++fit.iterations;
        const EStep e = em_e_step(beta, sigma, theta, config);
        Vector next_beta = em_beta_step(data, sigma, e.lambda_star, &beta).beta;
        const double next_theta = em_theta_step(e.pstar, config.a, config.b, p);
        const double q = e.lambda_star.cwiseProduct(next_beta.cwiseAbs()).sum();
        const double next_sigma = em_sigma_step(residual_ss(data.x, data.y, next_beta), q, n, static_cast<long>(p));

        const double change = std::max({(next_beta - beta).cwiseAbs().maxCoeff(), std::abs(next_sigma - sigma),
                                        std::abs(next_theta - theta)});
        beta = std::move(next_beta);
        sigma = next_sigma;
        theta = next_theta;
        fit.objective_trace.push_back(conj_log_posterior(data, beta, sigma, theta, config));
        if (change < config.tol) {
            fit.converged = true;
            break;
        }
    }
    fit.beta = Coefficients(std::move(beta));
    fit.sigma_hat = sigma;
    fit.theta_hat = theta;
    if (!fit.converged) throw DidNotConverge<ConjEmFit>("conjugate EM hit max_iter", std::move(fit));
    return fit;
}

/// sigma_MAP at the truth: tau + sqrt(tau^2 + sigma*^2 / (1 + p/n + 2/n)),
/// tau = lambda1 ||beta*||_1 / (2 (n + p + 2)).
inline double sigma_map_at_truth(double beta_true_l1, double sigma_oracle, long n, long p, double lambda1) {
    if (beta_true_l1 < 0.0 || sigma_oracle < 0.0 || lambda1 < 0.0 || n < 1 || p < 0)
        throw DomainError("sigma_map_at_truth: inputs must be non-negative");
    const double nn = static_cast<double>(n), pp = static_cast<double>(p);
    const double tau = lambda1 * beta_true_l1 / (2.0 * (nn + pp + 2.0));
    return tau + std::sqrt(tau * tau + sigma_oracle * sigma_oracle / (1.0 + pp / nn + 2.0 / nn));
}

} // namespace sslvar::conj
