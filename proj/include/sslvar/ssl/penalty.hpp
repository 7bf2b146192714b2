#pragma once

// Scalar building blocks of the spike-and-slab Lasso penalty.
//
// Notation: lambda0 is the spike rate, lambda1 the slab rate (lambda0 >= lambda1),
// theta the prior inclusion weight. `scale` is the factor multiplying the
// penalty in the coordinate update: sigma^2 for the Bayesian variant, sigma for
// the scaled variant.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "sslvar/core/errors.hpp"

namespace sslvar::ssl {

namespace detail {

inline void check_rates(double theta, double lambda0, double lambda1) {
    if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta must lie in (0,1), got " + std::to_string(theta));
    if (!(lambda1 > 0.0) || !(lambda0 >= lambda1))
        throw DomainError("rates must satisfy lambda0 >= lambda1 > 0");
}

// log of the odds (spike : slab) term inside p*.
inline double log_spike_odds(double beta, double theta, double lambda0, double lambda1) {
    return std::log(lambda0 / lambda1) + std::log1p(-theta) - std::log(theta) - std::abs(beta) * (lambda0 - lambda1);
}

// log(1 + e^t) without overflow.
inline double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

} // namespace detail

/// Conditional probability that beta came from the slab.
inline double p_star(double beta, double theta, double lambda0, double lambda1) {
    detail::check_rates(theta, lambda0, lambda1);
    const double t = detail::log_spike_odds(beta, theta, lambda0, lambda1);
    // 1 / (1 + e^t), evaluated on the side that cannot overflow.
    if (t > 0.0) {
        const double e = std::exp(-t);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(t));
}

/// Adaptive penalty rate: slab/spike mixture weighted by p*.
inline double lambda_star(double beta, double theta, double lambda0, double lambda1) {
    const double ps = p_star(beta, theta, lambda0, lambda1);
    return lambda1 * ps + lambda0 * (1.0 - ps);
}

/// pen(beta | theta) = -lambda1 |beta| + log[p*(0) / p*(beta)]; zero at the origin, never positive.
inline double ssl_penalty(double beta, double theta, double lambda0, double lambda1) {
    detail::check_rates(theta, lambda0, lambda1);
    // log p*(b) = -softplus(t(b))
    return -lambda1 * std::abs(beta) + detail::softplus(detail::log_spike_odds(beta, theta, lambda0, lambda1)) -
           detail::softplus(detail::log_spike_odds(0.0, theta, lambda0, lambda1));
}

/// Beta-binomial approximation of E[theta | beta].
inline double theta_update(long q_hat, double a, double b, long p) {
    return (a + static_cast<double>(q_hat)) / (a + b + static_cast<double>(p));
}

/// g(x; theta) = [lambda*(x) - lambda1]^2 + (2n / scale) log p*(x).
inline double g_fn(double x, double theta, double scale, long n, double lambda0, double lambda1) {
    if (!(scale > 0.0)) throw DomainError("g_fn: variance scale must be positive");
    const double ls = lambda_star(x, theta, lambda0, lambda1) - lambda1;
    return ls * ls + (2.0 * static_cast<double>(n) / scale) * std::log(p_star(x, theta, lambda0, lambda1));
}

/// Operational selection threshold Delta.
inline double delta_threshold(double theta, double scale, long n, double lambda0, double lambda1) {
    if (!(scale > 0.0)) throw DomainError("delta_threshold: variance scale must be positive");
    if (g_fn(0.0, theta, scale, n, lambda0, lambda1) > 0.0) {
        const double ps0 = p_star(0.0, theta, lambda0, lambda1);
        return std::sqrt(2.0 * static_cast<double>(n) * scale * std::log(1.0 / ps0)) + scale * lambda1;
    }
    return scale * lambda_star(0.0, theta, lambda0, lambda1);
}

/// (1/n) (|z| - lam)_+ sign(z) 1{|z| > delta}.
inline double generalized_threshold(double z, double lam, double delta, long n) {
    const double az = std::abs(z);
    if (az <= delta) return 0.0;
    const double shrunk = az - lam;
    if (shrunk <= 0.0) return 0.0;
    return std::copysign(shrunk, z) / static_cast<double>(n);
}

/// Exact threshold inf_{t>0} [n t / 2 - scale * pen(t) / t], found by a
/// log-spaced scan followed by Brent refinement around the best grid point.
inline double delta_exact(double theta, double scale, long n, double lambda0, double lambda1) {
    detail::check_rates(theta, lambda0, lambda1);
    if (!(scale > 0.0)) throw DomainError("delta_exact: variance scale must be positive");
    const double nn = static_cast<double>(n);
    const auto objective = [&](double log_t) {
        const double t = std::exp(log_t);
        return nn * t / 2.0 - scale * ssl_penalty(t, theta, lambda0, lambda1) / t;
    };
    // The t -> 0 limit of the objective is scale * lambda*(0).
    double best = scale * lambda_star(0.0, theta, lambda0, lambda1);
    const double lo = std::log(1e-12);
    const double hi = std::log(std::max(10.0, 10.0 * scale * lambda0 / nn + 10.0));
    constexpr int grid = 4000;
    const double step = (hi - lo) / grid;
    int best_i = -1;
    for (int i = 0; i <= grid; ++i) {
        const double v = objective(lo + step * i);
        if (v < best) {
            best = v;
            best_i = i;
        }
    }
    if (best_i >= 0) {
        const double a = lo + step * std::max(0, best_i - 1);
        const double b = lo + step * std::min(grid, best_i + 1);
        const auto [arg, val] = boost::math::tools::brent_find_minima(objective, a, b, 52);
        (void)arg;
        best = std::min(best, val);
    }
    return best;
}

/// Bounds on the exact threshold, valid when sigma (lambda0 - lambda1) > 2 sqrt(n)
/// and g(0; theta) > 0. `lower` uses the largest admissible d, i.e. the weakest
/// lower bound in the admissible family.
struct DeltaBounds {
    double lower;
    double upper;
    bool hypotheses_hold;
};

inline DeltaBounds delta_bounds(double theta, double sigma2, long n, double lambda0, double lambda1) {
    const double nn = static_cast<double>(n);
    const double sigma = std::sqrt(sigma2);
    const double log_inv = std::log(1.0 / p_star(0.0, theta, lambda0, lambda1));
    const double inner = nn / (sigma2 * (lambda0 - lambda1)) - std::sqrt(2.0 * nn) / sigma;
    const double d_max = 2.0 * nn / sigma2 - inner * inner;
    const double radicand = 2.0 * nn * sigma2 * log_inv - sigma2 * sigma2 * d_max;
    DeltaBounds b{};
    b.upper = std::sqrt(2.0 * nn * sigma2 * log_inv) + sigma2 * lambda1;
    b.lower = std::sqrt(std::max(0.0, radicand)) + sigma2 * lambda1;
    b.hypotheses_hold = sigma * (lambda0 - lambda1) > 2.0 * std::sqrt(nn) &&
                        g_fn(0.0, theta, sigma2, n, lambda0, lambda1) > 0.0;
    return b;
}

} // namespace sslvar::ssl
