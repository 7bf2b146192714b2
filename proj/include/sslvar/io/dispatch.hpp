#pragma once

#include <optional>
#include <string>

#include "sslvar/baselines.hpp"
#include "sslvar/conjugate_em.hpp"
#include "sslvar/core/dataset.hpp"
#include "sslvar/io/serialize.hpp"
#include "sslvar/ridge.hpp"
#include "sslvar/simbench/cv.hpp"
#include "sslvar/ssl/solver.hpp"

namespace sslvar::io {

/// Outcome of one configured fit. Non-convergence is reported through
/// `converged` with the partial estimate kept, never thrown.
struct FitOutcome {
    Algorithm algorithm = Algorithm::Ssl;
    RawScaleFit fit;
    std::optional<double> sigma2_hat;
    std::optional<double> sigma2_adj;
    std::optional<double> theta;
    bool converged = true;
    std::string message; // non-convergence diagnostic
    Json trace = Json::array();
    std::optional<ridge::GibbsChain> chain;
};

namespace detail {

inline Json ladder_json(const std::vector<ssl::LadderRecord>& trace) {
    Json out = Json::array();
    for (const auto& r : trace)
        out.push_back(Json{{"lambda0", r.lambda0},
                           {"iterations", r.iterations},
                           {"q_hat", r.q_hat},
                           {"sigma2", r.sigma2},
                           {"converged", r.converged},
                           {"sigma_updated", r.sigma_updated},
                           {"degenerate", r.degenerate}});
    return out;
}

inline void absorb_ssl(FitOutcome& out, const ssl::SslFit& f, const Dataset& data) {
    out.fit = destandardize_coefficients(f.coef, data);
    out.sigma2_hat = f.sigma2_hat;
    if (f.coef.q_hat() < data.n()) out.sigma2_adj = f.sigma2_adj;
    out.theta = f.theta_hat;
    out.trace = ladder_json(f.ladder_trace);
}

inline void absorb_conj(FitOutcome& out, const conj::ConjEmFit& f, const Dataset& data) {
    out.fit = destandardize_coefficients(f.beta, data);
    out.sigma2_hat = f.sigma_hat * f.sigma_hat;
    out.theta = f.theta_hat;
    out.trace = f.objective_trace;
}

inline void absorb_ridge(FitOutcome& out, const ridge::RidgeEstimates& est, const Dataset& data) {
    out.fit = destandardize_coefficients(Coefficients(est.beta_mean), data);
    out.sigma2_hat = est.sigma2_estimate;
}

inline std::optional<double> df_adjusted(const Dataset& data, const Vector& beta) {
    const Index q = (beta.array() != 0.0).count();
    if (q >= data.n()) return std::nullopt;
    return residual_ss(data.x, data.y, beta) / static_cast<double>(data.n() - q);
}

} // namespace detail

/// Fits `raw` with the configured algorithm. Every algorithm works on the
/// standardized design; coefficients are mapped back to the raw scale with an
/// intercept. `rng` drives the Gibbs sampler, lasso CV folds and randomized
/// SSL sweeps. Input and domain errors propagate.
inline FitOutcome run_fit(const FitRequest& req, const Dataset& raw, RngSpec rng) {
    const Dataset data = standardize(raw);
    FitOutcome out;
    out.algorithm = req.algorithm;
    switch (req.algorithm) {
    case Algorithm::Ssl:
        try {
            detail::absorb_ssl(out, ssl::fit_ssl(data, req.ssl, rng), data);
        } catch (const DidNotConverge<ssl::SslFit>& e) {
            detail::absorb_ssl(out, e.partial(), data);
            out.converged = false;
            out.message = e.what();
        }
        break;
    case Algorithm::ConjugateEm:
        try {
            detail::absorb_conj(out, conj::run_conj_em(data, req.conj), data);
        } catch (const DidNotConverge<conj::ConjEmFit>& e) {
            detail::absorb_conj(out, e.partial(), data);
            out.converged = false;
            out.message = e.what();
        }
        break;
    case Algorithm::LeastSquares: detail::absorb_ridge(out, ridge::least_squares(data), data); break;
    case Algorithm::ConjugateRidge: detail::absorb_ridge(out, ridge::conjugate_ridge(data, req.tau2), data); break;
    case Algorithm::Zellner: detail::absorb_ridge(out, ridge::zellner(data, req.g), data); break;
    case Algorithm::Gibbs: {
        ridge::GibbsChain chain = ridge::gibbs_independent_ridge(data, req.tau2, req.iterations, req.burn_in, rng);
        detail::absorb_ridge(out, chain.estimates(req.tau2), data);
        out.trace = std::vector<double>(chain.sigma2_draws.data() + chain.burn_in,
                                        chain.sigma2_draws.data() + chain.sigma2_draws.size());
        out.chain = std::move(chain);
        break;
    }
    case Algorithm::Lasso: {
        Coefficients coef;
        try {
            if (req.lambda > 0.0) {
                coef = baselines::lasso_cd(data, static_cast<double>(data.n()) * req.lambda).coef;
            } else {
                const auto cv = simbench::cv_lasso(raw, req.cv_folds, rng);
                coef = cv.coef;
                for (std::size_t l = 0; l < cv.lambdas.size(); ++l)
                    out.trace.push_back(Json{{"lambda", cv.lambdas[l]}, {"cv_error", cv.cv_error[l]}});
            }
        } catch (const DidNotConverge<baselines::LassoFit>& e) {
            coef = e.partial().coef;
            out.converged = false;
            out.message = e.what();
        }
        out.fit = destandardize_coefficients(coef, data);
        out.sigma2_adj = detail::df_adjusted(data, coef.beta);
        break;
    }
    case Algorithm::ScaledLasso: {
        const double lambda0 =
            req.scaled_lambda0 > 0.0 ? req.scaled_lambda0 : baselines::universal_lambda0(data.n(), data.p());
        baselines::ScaledLassoFit f;
        try {
            f = baselines::scaled_lasso(data, lambda0);
        } catch (const DidNotConverge<baselines::ScaledLassoFit>& e) {
            f = e.partial();
            out.converged = false;
            out.message = e.what();
        }
        out.fit = destandardize_coefficients(f.beta, data);
        out.sigma2_hat = f.sigma_hat * f.sigma_hat;
        out.sigma2_adj = detail::df_adjusted(data, f.beta.beta);
        out.trace = f.loss_trace;
        break;
    }
    }
    return out;
}

inline Json fit_json(const FitOutcome& out, Index n) {
    Json doc{{"algorithm", to_string(out.algorithm)},
             {"n", n},
             {"p", out.fit.beta.size()},
             {"converged", out.converged},
             {"intercept", out.fit.intercept},
             {"coefficients", sparse_coefficients(out.fit.beta)},
             {"q_hat", (out.fit.beta.array() != 0.0).count()}};
    if (out.sigma2_hat) doc["sigma2_hat"] = detail::finite_or_null(*out.sigma2_hat);
    if (out.sigma2_adj) doc["sigma2_adj"] = detail::finite_or_null(*out.sigma2_adj);
    if (out.theta) doc["theta"] = *out.theta;
    if (!out.converged) doc["message"] = out.message;
    doc["trace"] = out.trace;
    return doc;
}

} // namespace sslvar::io
