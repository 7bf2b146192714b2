#pragma once

// Coordinate ascent for the spike-and-slab Lasso with fixed, unknown (independent
// prior) or scaled error variance, run over an increasing ladder of spike rates
// with warm starts.

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "sslvar/core/dataset.hpp"
#include "sslvar/core/rng.hpp"
#include "sslvar/ssl/config.hpp"
#include "sslvar/ssl/penalty.hpp"

namespace sslvar::ssl {

/// Quantities that stay fixed across one block of coordinate updates.
struct PenaltyState {
    double theta = 0.5;
    double sigma2 = 1.0;
    double scale = 1.0; // sigma2, or sigma in scaled mode
    double p_star_zero = 0.5;
    double lambda_star_zero = 1.0;
    double delta = 1.0;
    double g_zero = 0.0;
};

inline double penalty_scale(double sigma2, VarianceKind kind) {
    return kind == VarianceKind::Scaled ? std::sqrt(sigma2) : sigma2;
}

inline PenaltyState make_penalty_state(double theta, double sigma2, VarianceKind kind, long n, double lambda0,
                                       double lambda1) {
    PenaltyState s;
    s.theta = theta;
    s.sigma2 = sigma2;
    s.scale = penalty_scale(sigma2, kind);
    s.p_star_zero = p_star(0.0, theta, lambda0, lambda1);
    s.lambda_star_zero = lambda1 * s.p_star_zero + lambda0 * (1.0 - s.p_star_zero);
    s.g_zero = g_fn(0.0, theta, s.scale, n, lambda0, lambda1);
    s.delta = delta_threshold(theta, s.scale, n, lambda0, lambda1);
    return s;
}

struct LadderRecord {
    double lambda0 = 0.0;
    int iterations = 0;
    Index q_hat = 0;
    double sigma2 = 0.0;
    bool converged = false;
    bool sigma_updated = false; // variance was re-estimated on this rung
    bool degenerate = false;    // residuals collapsed or q_hat reached n; sigma2 was clamped
};

struct SslFit {
    Coefficients coef;
    double sigma2_hat = 0.0; // last Newton value (the fixed value in Fixed mode)
    double sigma2_adj = 0.0; // RSS / (n - q_hat)
    double theta_hat = 0.5;
    std::vector<LadderRecord> ladder_trace;
    int refine_sweeps = 0;
    bool converged = false;
    double elapsed_seconds = 0.0;
};

/// Newton step for sigma^2 given the residual sum of squares.
inline double sigma2_newton(double residual_ss, long n, const VarianceMode& mode) {
    switch (mode.kind) {
    case VarianceKind::Unknown: return residual_ss / static_cast<double>(n + 2);
    case VarianceKind::Scaled: return residual_ss / static_cast<double>(n);
    case VarianceKind::Fixed: break;
    }
    return mode.sigma2;
}

/// Degrees-of-freedom adjusted variance.
inline double sigma2_adjusted(double residual_ss, long n, long q_hat) {
    if (q_hat >= n)
        throw DegenerateFit("selected " + std::to_string(q_hat) + " coefficients with only " + std::to_string(n) +
                            " observations");
    return residual_ss / static_cast<double>(n - q_hat);
}

/// Mode of the scaled-inverse-chi^2 (nu = 3) prior whose 90th percentile is var(y).
inline double init_sigma2(const Vector& y) {
    const double var = sample_variance(y);
    if (!(var > 0.0)) throw DomainError("init_sigma2: response has zero variance");
    constexpr double nu = 3.0;
    const double lower_quantile = boost::math::quantile(boost::math::chi_squared_distribution<double>(nu), 0.10);
    const double scale2 = var * lower_quantile / nu;
    return nu * scale2 / (nu + 2.0);
}

namespace detail {

// A zero coordinate with Delta < |z| <= scale * lambda*(0) is a fixed point of
// the one-step threshold yet violates the exclusion condition. Move it to the
// largest root of n b = |z| - scale * lambda*(b): the right side is increasing
// in b, so iterating down from |z| / n converges monotonically to that root.
inline double escape_zero(double z, const PenaltyState& state, double lambda0, double lambda1, double nn) {
    const double az = std::abs(z);
    double b = az / nn;
    for (int it = 0; it < 10000; ++it) {
        const double next = std::max(0.0, az - state.scale * lambda_star(b, state.theta, lambda0, lambda1)) / nn;
        const bool settled = b - next <= 1e-15 * std::max(1.0, b);
        b = next;
        if (settled || b == 0.0) break;
    }
    return std::copysign(b, z);
}

// Updates coordinates order[begin, end) in place, keeping residual = y - x beta.
// Returns the change in the number of nonzero coefficients.
inline Index update_block(const Dataset& data, Vector& beta, Vector& residual, const std::vector<Index>& order,
                          std::size_t begin, std::size_t end, const PenaltyState& state, double lambda0,
                          double lambda1) {
    const long n = static_cast<long>(data.n());
    const double nn = static_cast<double>(n);
    const double zero_penalty = state.scale * state.lambda_star_zero;
    Index nonzero_change = 0;
    for (std::size_t k = begin; k < end; ++k) {
        const Index j = order[k];
        const double old = beta[j];
        const double z = data.x.col(j).dot(residual) + nn * old;
        const double lam = old == 0.0 ? zero_penalty : state.scale * lambda_star(old, state.theta, lambda0, lambda1);
        double updated = generalized_threshold(z, lam, state.delta, n);
        if (old == 0.0 && updated == 0.0 && std::abs(z) > state.delta) updated = escape_zero(z, state, lambda0, lambda1, nn);
        if (updated != old) {
            residual.noalias() -= (updated - old) * data.x.col(j);
            beta[j] = updated;
            nonzero_change += (updated != 0.0 ? 1 : 0) - (old != 0.0 ? 1 : 0);
        }
    }
    return nonzero_change;
}

} // namespace detail

/// One full sweep in index order with a frozen penalty state. `residual` must
/// equal y - x beta on entry and is kept in sync.
inline void coordinate_sweep(const Dataset& data, Vector& beta, Vector& residual, const PenaltyState& state,
                             double lambda0, double lambda1) {
    if (beta.size() != data.p() || residual.size() != data.n())
        throw DimensionMismatch("coordinate_sweep: dimensions disagree");
    std::vector<Index> order(static_cast<std::size_t>(data.p()));
    std::iota(order.begin(), order.end(), Index{0});
    detail::update_block(data, beta, residual, order, 0, order.size(), state, lambda0, lambda1);
}

/// Runs the ladder. Throws DidNotConverge<SslFit> when the last rung hits
/// max_iter and DegenerateFit when the final model has q_hat >= n.
inline SslFit fit_ssl(const Dataset& data, const SslConfig& config, RngSpec rng_spec = {}) {
    const auto started = std::chrono::steady_clock::now();
    if (!data.standardized) throw NotStandardized();
    config.validate();

    const Index p = data.p();
    const long n = static_cast<long>(data.n());
    const VarianceMode& mode = config.variance_mode;
    const double lambda1 = config.lambda1;
    const auto m = static_cast<std::size_t>(config.update_frequency_m);
    const double y_ss = data.y.squaredNorm();
    const double y_var = sample_variance(data.y);

    Vector beta = Vector::Zero(p);
    Vector residual = data.y;
    Index q = 0;
    double theta = 0.5;
    const double sigma2_init = mode.kind == VarianceKind::Fixed ? mode.sigma2
                               : config.sigma_init_policy.kind == SigmaInitPolicy::Kind::Explicit
                                   ? config.sigma_init_policy.sigma2
                                   : init_sigma2(data.y);
    double sigma2 = sigma2_init;

    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    std::optional<Rng> order_rng;
    if (config.randomize_order) order_rng.emplace(rng_spec, StreamPurpose::Sampler);

    SslFit fit;
    fit.ladder_trace.reserve(config.lambda0_ladder.size());

    // Iterations used by the previous rung; "infinite" before the first rung so
    // that the variance stays frozen through rung one.
    int previous_iterations = std::numeric_limits<int>::max();
    bool previous_degenerate = false;

    // One sweep over all coordinates in blocks of m. Returns false when the
    // residuals collapsed or the model saturated and sigma2 had to be clamped.
    const auto sweep = [&](double lambda0, bool update_sigma) {
        if (order_rng) order_rng->shuffle(order);
        bool healthy = true;
        for (std::size_t begin = 0; begin < order.size(); begin += m) {
            const std::size_t end = std::min(order.size(), begin + m);
            const PenaltyState state = make_penalty_state(theta, sigma2, mode.kind, n, lambda0, lambda1);
            q += detail::update_block(data, beta, residual, order, begin, end, state, lambda0, lambda1);
            theta = theta_update(static_cast<long>(q), config.a, config.b, static_cast<long>(p));
            if (update_sigma) {
                const double rss = residual.squaredNorm();
                if (rss < 1e-12 * y_ss || q >= n) {
                    sigma2 = 1e-8 * y_var;
                    healthy = false;
                } else {
                    sigma2 = sigma2_newton(rss, n, mode);
                }
            }
        }
        return healthy;
    };

    for (const double lambda0 : config.lambda0_ladder) {
        const bool update_sigma = mode.kind != VarianceKind::Fixed && previous_iterations < 100;
        if (mode.kind != VarianceKind::Fixed && previous_degenerate && !update_sigma) sigma2 = sigma2_init;
        const bool switching_on = update_sigma && (fit.ladder_trace.empty() || !fit.ladder_trace.back().sigma_updated);
        if (switching_on && config.reinitialize_on_variance_switch) {
            beta.setZero();
            residual = data.y;
            q = 0;
            sigma2 = sigma2_init;
        }

        LadderRecord record;
        record.lambda0 = lambda0;
        record.sigma_updated = update_sigma;
        while (record.iterations < config.max_iter) {
            ++record.iterations;
            const Vector before = beta;
            if (!sweep(lambda0, update_sigma)) record.degenerate = true;
            if ((beta - before).norm() <= config.tol_eps) {
                record.converged = !record.degenerate;
                break;
            }
        }
        record.q_hat = q;
        record.sigma2 = sigma2;
        fit.ladder_trace.push_back(record);
        previous_iterations = record.converged ? record.iterations : std::numeric_limits<int>::max();
        previous_degenerate = record.degenerate;
    }

    const LadderRecord& last = fit.ladder_trace.back();
    fit.converged = last.converged;
    if (fit.converged && config.refine_tol > 0.0) {
        while (fit.refine_sweeps < config.refine_max_sweeps) {
            ++fit.refine_sweeps;
            const Vector before = beta;
            sweep(last.lambda0, last.sigma_updated);
            if ((beta - before).norm() <= config.refine_tol) break;
        }
        fit.ladder_trace.back().q_hat = q;
        fit.ladder_trace.back().sigma2 = sigma2;
    }

    fit.coef = Coefficients(std::move(beta));
    fit.theta_hat = theta;
    fit.sigma2_hat = sigma2;
    const double rss = residual.squaredNorm();
    fit.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!fit.converged) {
        fit.sigma2_adj = q < n ? rss / static_cast<double>(n - q) : std::numeric_limits<double>::quiet_NaN();
        throw DidNotConverge<SslFit>("final ladder rung did not converge within " + std::to_string(config.max_iter) +
                                         " iterations",
                                     std::move(fit));
    }
    fit.sigma2_adj = sigma2_adjusted(rss, n, static_cast<long>(q));
    return fit;
}

/// Residuals of the optimality conditions at a returned mode.
struct KktReport {
    double max_included_residual = 0.0; // |beta_j - (1/n)[|z_j| - s lambda*]_+ sign(z_j)|
    double max_excluded_excess = 0.0;   // max(|z_j| - Delta) over zero coordinates (<= 0 passes)
    Index included = 0;
    Index excluded = 0;

    bool passes(double tol) const { return max_included_residual <= tol && max_excluded_excess <= 0.0; }
};

/// Checks a fit against its KKT conditions at the final rung, using the final
/// theta and sigma2. Exclusion uses a 1e-9 relative slack on Delta.
inline KktReport kkt_certificate(const Dataset& data, const SslFit& fit, const SslConfig& config) {
    const long n = static_cast<long>(data.n());
    const double nn = static_cast<double>(n);
    const double lambda0 = config.lambda0_ladder.back();
    const double lambda1 = config.lambda1;
    const PenaltyState state =
        make_penalty_state(fit.theta_hat, fit.sigma2_hat, config.variance_mode.kind, n, lambda0, lambda1);
    const Vector residual = data.y - data.x * fit.coef.beta;
    KktReport report;
    report.max_excluded_excess = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < data.p(); ++j) {
        const double b = fit.coef.beta[j];
        const double z = data.x.col(j).dot(residual) + nn * b;
        if (b != 0.0) {
            ++report.included;
            const double lam = state.scale * lambda_star(b, state.theta, lambda0, lambda1);
            const double target = std::copysign(std::max(0.0, std::abs(z) - lam), z) / nn;
            report.max_included_residual = std::max(report.max_included_residual, std::abs(b - target));
        } else {
            ++report.excluded;
            report.max_excluded_excess =
                std::max(report.max_excluded_excess, std::abs(z) - state.delta * (1.0 + 1e-9));
        }
    }
    if (report.excluded == 0) report.max_excluded_excess = 0.0;
    return report;
}

} // namespace sslvar::ssl
