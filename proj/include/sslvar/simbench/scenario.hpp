#pragma once

#include <cmath>
#include <set>
#include <vector>

#include "sslvar/core/dataset.hpp"
#include "sslvar/core/rng.hpp"

namespace sslvar::simbench {

/// Generative description of one benchmark experiment: block-diagonal
/// equicorrelated Gaussian design, sparse truth, Gaussian noise.
struct SimScenario {
    Index n = 100;
    Index p = 1000;
    Index block_size = 50;
    double rho = 0.9;
    std::vector<double> nonzero_values{-2.5, -2.0, -1.5, 1.5, 2.0, 2.5};
    std::vector<Index> nonzero_positions{0, 50, 100, 150, 200, 250}; // 0-based
    double sigma2_true = 3.0;
    RngSpec seed{20190601, 0};

    void validate() const {
        if (n < 3 || p < 1) throw DomainError("scenario needs n >= 3 and p >= 1");
        if (block_size < 1 || p % block_size != 0) throw DomainError("block_size must divide p");
        if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("rho must lie in [0, 1)");
        if (nonzero_values.size() != nonzero_positions.size())
            throw DomainError("nonzero values and positions differ in length");
        std::set<Index> seen;
        for (const Index j : nonzero_positions) {
            if (j < 0 || j >= p) throw DomainError("nonzero position out of range");
            if (!seen.insert(j).second) throw DomainError("duplicate nonzero position");
        }
        if (!(sigma2_true >= 0.0)) throw DomainError("sigma2_true must be non-negative");
    }

    Vector beta_true() const {
        Vector beta = Vector::Zero(p);
        for (std::size_t k = 0; k < nonzero_positions.size(); ++k) beta[nonzero_positions[k]] = nonzero_values[k];
        return beta;
    }

    /// Independent-design variant with n = 100, p = 90 used for the ridge study.
    /// Positions are immaterial for an i.i.d. design; they are spread evenly.
    static SimScenario ridge_study() {
        SimScenario s;
        s.p = 90;
        s.block_size = 1;
        s.rho = 0.0;
        s.nonzero_positions = {0, 15, 30, 45, 60, 75};
        return s;
    }
};

/// Rows i.i.d. N(0, Sigma), Sigma = bdiag(R, ..., R) with R = (1 - rho) I + rho 11'.
/// Each block uses the one-factor representation sqrt(rho) f + sqrt(1 - rho) e,
/// which has exactly that covariance.
inline Matrix generate_design(const SimScenario& scenario, Rng& rng) {
    scenario.validate();
    Matrix x(scenario.n, scenario.p);
    const double shared = std::sqrt(scenario.rho);
    const double own = std::sqrt(1.0 - scenario.rho);
    const Index blocks = scenario.p / scenario.block_size;
    for (Index i = 0; i < scenario.n; ++i) {
        for (Index b = 0; b < blocks; ++b) {
            const double factor = scenario.rho > 0.0 ? rng.normal() : 0.0;
            for (Index k = 0; k < scenario.block_size; ++k)
                x(i, b * scenario.block_size + k) = shared * factor + own * rng.normal();
        }
    }
    return x;
}

/// y = x beta0 + eps, eps ~ N(0, sigma2 I).
inline Vector generate_response(const Matrix& x, const Vector& beta0, double sigma2, Rng& rng) {
    if (x.cols() != beta0.size()) throw DimensionMismatch("generate_response: beta length differs from p");
    if (sigma2 < 0.0) throw DomainError("generate_response: negative variance");
    Vector y = x * beta0;
    if (sigma2 > 0.0) {
        const double sd = std::sqrt(sigma2);
        for (Index i = 0; i < y.size(); ++i) y[i] += sd * rng.normal();
    }
    return y;
}

/// Raw dataset for replication `replication` of the scenario.
inline Dataset generate_dataset(const SimScenario& scenario, std::uint64_t replication) {
    Rng rng(RngSpec{scenario.seed.seed, scenario.seed.stream_id + replication}, StreamPurpose::Data);
    Matrix x = generate_design(scenario, rng);
    Vector y = generate_response(x, scenario.beta_true(), scenario.sigma2_true, rng);
    return Dataset::raw(std::move(x), std::move(y));
}

} // namespace sslvar::simbench
