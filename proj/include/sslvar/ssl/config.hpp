#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "sslvar/core/dataset.hpp"
#include "sslvar/core/errors.hpp"

namespace sslvar::ssl {

enum class VarianceKind { Fixed, Unknown, Scaled };

struct VarianceMode {
    VarianceKind kind = VarianceKind::Unknown;
    double sigma2 = 1.0; // only meaningful for Fixed

    static VarianceMode fixed(double sigma2) { return {VarianceKind::Fixed, sigma2}; }
    static VarianceMode unknown() { return {VarianceKind::Unknown, 1.0}; }
    static VarianceMode scaled() { return {VarianceKind::Scaled, 1.0}; }
};

struct SigmaInitPolicy {
    enum class Kind { ScaledInvChiSqMode, Explicit };
    Kind kind = Kind::ScaledInvChiSqMode;
    double sigma2 = 1.0; // only meaningful for Explicit

    static SigmaInitPolicy scaled_inv_chisq_mode() { return {}; }
    static SigmaInitPolicy explicit_value(double sigma2) { return {Kind::Explicit, sigma2}; }
};

struct SslConfig {
    double lambda1 = 1.0;
    std::vector<double> lambda0_ladder;
    double a = 1.0;
    double b = 1.0;
    int update_frequency_m = 10;
    double tol_eps = 1e-3;      // on ||beta^k - beta^{k-1}||_2
    int max_iter = 500;         // sweeps per ladder rung
    VarianceMode variance_mode = VarianceMode::unknown();
    SigmaInitPolicy sigma_init_policy;
    // After the last rung converges, keep sweeping until the step falls below
    // refine_tol so the returned mode satisfies its KKT conditions tightly.
    // Zero disables refinement.
    double refine_tol = 1e-10;
    int refine_max_sweeps = 5000;
    bool randomize_order = false;
    // When sigma2 updating switches on, restart from beta = 0 and the initial
    // sigma2 instead of the previous rung's mode.
    bool reinitialize_on_variance_switch = true;

    /// lambda1 = 1, ladder 1..100, a = 1, b = p, unknown variance.
    static SslConfig defaults_for(Index p) {
        SslConfig c;
        c.b = static_cast<double>(p);
        for (int l = 1; l <= 100; ++l) c.lambda0_ladder.push_back(l);
        return c;
    }

    void validate() const {
        if (!(lambda1 > 0.0)) throw DomainError("lambda1 must be positive");
        if (lambda0_ladder.empty()) throw DomainError("lambda0 ladder is empty");
        if (lambda0_ladder.front() < lambda1) throw DomainError("lambda0 ladder must start at or above lambda1");
        for (std::size_t i = 1; i < lambda0_ladder.size(); ++i)
            if (!(lambda0_ladder[i] > lambda0_ladder[i - 1]))
                throw DomainError("lambda0 ladder must be strictly increasing");
        if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta prior shapes a, b must be positive");
        if (update_frequency_m < 1) throw DomainError("update frequency must be >= 1");
        if (!(tol_eps > 0.0)) throw DomainError("tol_eps must be positive");
        if (max_iter < 1) throw DomainError("max_iter must be >= 1");
        if (variance_mode.kind == VarianceKind::Fixed && !(variance_mode.sigma2 > 0.0))
            throw DomainError("fixed sigma2 must be positive");
        if (sigma_init_policy.kind == SigmaInitPolicy::Kind::Explicit && !(sigma_init_policy.sigma2 > 0.0))
            throw DomainError("explicit initial sigma2 must be positive");
        if (refine_tol < 0.0) throw DomainError("refine_tol must be non-negative");
    }
};

/// Parses "start:end:step" into the inclusive arithmetic sequence.
inline std::vector<double> parse_ladder(std::string_view spec) {
    std::vector<double> parts;
    while (true) {
        const auto colon = spec.find(':');
        const auto field = spec.substr(0, colon);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size())
            throw DomainError("bad ladder field '" + std::string(field) + "'");
        parts.push_back(v);
        if (colon == std::string_view::npos) break;
        spec.remove_prefix(colon + 1);
    }
    if (parts.size() != 3) throw DomainError("ladder must have the form start:end:step");
    const double start = parts[0], end = parts[1], step = parts[2];
    if (!(step > 0.0) || end < start) throw DomainError("ladder needs step > 0 and end >= start");
    std::vector<double> ladder;
    const auto count = static_cast<long>(std::floor((end - start) / step + 1e-9));
    for (long i = 0; i <= count; ++i) ladder.push_back(start + step * static_cast<double>(i));
    return ladder;
}

} // namespace sslvar::ssl
