#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "sslvar/baselines.hpp"
#include "sslvar/conjugate_em.hpp"
#include "sslvar/core/csv.hpp"
#include "sslvar/core/dataset.hpp"
#include "sslvar/core/errors.hpp"
#include "sslvar/core/rng.hpp"
#include "sslvar/simbench/cv.hpp"
#include "sslvar/ssl/config.hpp"
#include "sslvar/ssl/solver.hpp"

namespace sslvar::simbench {

enum class MethodKind { SslUnknown, SslFixed, ScaledSsl, ScaledLasso, Lasso, ConjEm };

/// A benchmark method. Names: ssl_unknown, ssl_fixed:<sigma2>, scaled_ssl,
/// scaled_lasso, lasso (10-fold CV), conj_em.
struct MethodSpec {
    MethodKind kind = MethodKind::SslUnknown;
    double sigma2 = 0.0; // ssl_fixed only

    std::string name() const {
        switch (kind) {
        case MethodKind::SslUnknown: return "ssl_unknown";
        case MethodKind::SslFixed: return "ssl_fixed:" + csv::format_number(sigma2);
        case MethodKind::ScaledSsl: return "scaled_ssl";
        case MethodKind::ScaledLasso: return "scaled_lasso";
        case MethodKind::Lasso: return "lasso";
        case MethodKind::ConjEm: return "conj_em";
        }
        return "unknown";
    }

    static MethodSpec parse(std::string_view text) {
        if (text == "ssl_unknown") return {MethodKind::SslUnknown};
        if (text == "scaled_ssl") return {MethodKind::ScaledSsl};
        if (text == "scaled_lasso") return {MethodKind::ScaledLasso};
        if (text == "lasso") return {MethodKind::Lasso};
        if (text == "conj_em") return {MethodKind::ConjEm};
        constexpr std::string_view fixed = "ssl_fixed:";
        if (text.substr(0, fixed.size()) == fixed) {
            const auto value = text.substr(fixed.size());
            double s2 = 0.0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), s2);
            if (ec != std::errc() || ptr != value.data() + value.size() || !(s2 > 0.0))
                throw DomainError("bad fixed variance in method '" + std::string(text) + "'");
            return {MethodKind::SslFixed, s2};
        }
        throw DomainError("unknown method '" + std::string(text) + "'");
    }
};

/// Comma-separated method list.
inline std::vector<MethodSpec> parse_methods(std::string_view list) {
    std::vector<MethodSpec> out;
    while (!list.empty()) {
        const auto comma = list.find(',');
        const auto item = list.substr(0, comma);
        if (!item.empty()) out.push_back(MethodSpec::parse(item));
        if (comma == std::string_view::npos) break;
        list.remove_prefix(comma + 1);
    }
    if (out.empty()) throw DomainError("method list is empty");
    return out;
}

struct MethodOutcome {
    RawScaleFit fit;              // raw-scale coefficients and intercept
    double sigma2_estimate = 0.0; // df-corrected where the method has no native estimate
    double runtime_seconds = 0.0;
};

namespace detail {

inline double df_corrected(const Dataset& data, const Vector& beta) {
    const Index q = (beta.array() != 0.0).count();
    if (q >= data.n()) return std::numeric_limits<double>::quiet_NaN();
    return residual_ss(data.x, data.y, beta) / static_cast<double>(data.n() - q);
}

} // namespace detail

/// Fits one method on a raw dataset. `rng` seeds any internal randomness
/// (CV folds). Solver errors propagate.
inline MethodOutcome run_method(const MethodSpec& method, const Dataset& raw, RngSpec rng) {
    const auto started = std::chrono::steady_clock::now();
    const Dataset data = standardize(raw);
    MethodOutcome out;
    Coefficients coef;
    switch (method.kind) {
    case MethodKind::SslUnknown:
    case MethodKind::SslFixed:
    case MethodKind::ScaledSsl: {
        ssl::SslConfig config = ssl::SslConfig::defaults_for(data.p());
        if (method.kind == MethodKind::SslFixed) config.variance_mode = ssl::VarianceMode::fixed(method.sigma2);
        if (method.kind == MethodKind::ScaledSsl) config.variance_mode = ssl::VarianceMode::scaled();
        ssl::SslFit fit = ssl::fit_ssl(data, config, rng);
        out.sigma2_estimate = fit.sigma2_adj;
        coef = std::move(fit.coef);
        break;
    }
    case MethodKind::ScaledLasso: {
        const auto fit = baselines::scaled_lasso(data, baselines::universal_lambda0(data.n(), data.p()));
        coef = fit.beta;
        out.sigma2_estimate = detail::df_corrected(data, coef.beta);
        break;
    }
    case MethodKind::Lasso: {
        coef = cv_lasso(raw, 10, rng).coef;
        out.sigma2_estimate = detail::df_corrected(data, coef.beta);
        break;
    }
    case MethodKind::ConjEm: {
        const auto fit = conj::run_conj_em(data, conj::ConjEmConfig::defaults_for(data.p()));
        coef = fit.beta;
        out.sigma2_estimate = fit.sigma_hat * fit.sigma_hat;
        break;
    }
    }
    out.fit = destandardize_coefficients(coef, data);
    out.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

} // namespace sslvar::simbench
