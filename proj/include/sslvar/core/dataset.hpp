#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sslvar/core/errors.hpp"

namespace sslvar {

using Eigen::Index;
using Matrix = Eigen::MatrixXd; // column-major
using Vector = Eigen::VectorXd;

/// Regression coefficients. Support and q_hat are derived from beta, so they
/// can never disagree with it.
struct Coefficients {
    Vector beta;

    Coefficients() = default;
    explicit Coefficients(Vector b) : beta(std::move(b)) {}
    static Coefficients zeros(Index p) { return Coefficients(Vector::Zero(p)); }

    Index size() const noexcept { return beta.size(); }

    /// Ascending indices of exactly-nonzero entries.
    std::vector<Index> support() const {
        std::vector<Index> s;
        for (Index j = 0; j < beta.size(); ++j)
            if (beta[j] != 0.0) s.push_back(j);
        return s;
    }

    Index q_hat() const noexcept { return (beta.array() != 0.0).count(); }
};

/// Design matrix and response, optionally centred and scaled.
///
/// When `standardized` is true every column of `x` has mean 0 and Euclidean
/// norm sqrt(n), `y` has mean 0, and `column_means`, `column_scales`, `y_mean`
/// record how to map back to the raw scale (x_raw = x * scale + mean).
struct Dataset {
    Matrix x;
    Vector y;
    Vector column_means;
    Vector column_scales;
    double y_mean = 0.0;
    bool standardized = false;

    Index n() const noexcept { return x.rows(); }
    Index p() const noexcept { return x.cols(); }

    /// Raw dataset; validates shape and finiteness.
    static Dataset raw(Matrix x, Vector y) {
        if (x.rows() != y.size())
            throw DimensionMismatch("x has " + std::to_string(x.rows()) + " rows but y has " +
                                    std::to_string(y.size()) + " entries");
        if (x.rows() < 3) throw DomainError("need at least 3 observations");
        if (x.cols() < 1) throw DomainError("need at least 1 predictor");
        if (!x.allFinite() || !y.allFinite()) throw NonFiniteInput();
        Dataset d;
        d.column_means = Vector::Zero(x.cols());
        d.column_scales = Vector::Ones(x.cols());
        d.x = std::move(x);
        d.y = std::move(y);
        return d;
    }
};

/// Centre every column and scale it to norm sqrt(n); centre y.
/// Returns the input unchanged when it is already flagged standardized.
inline Dataset standardize(const Dataset& data) {
    if (data.standardized) return data;
    const Index n = data.n();
    const Index p = data.p();
    if (n < 3) throw DomainError("need at least 3 observations");
    if (!data.x.allFinite() || !data.y.allFinite()) throw NonFiniteInput();
    if (data.y.size() != n) throw DimensionMismatch("x and y row counts differ");

    Dataset out;
    out.x.resize(n, p);
    out.column_means.resize(p);
    out.column_scales.resize(p);
    const double root_n = std::sqrt(static_cast<double>(n));
    for (Index j = 0; j < p; ++j) {
        const double mean = data.x.col(j).mean();
        Vector centred = data.x.col(j).array() - mean;
        const double norm = centred.norm();
        const double magnitude = data.x.col(j).cwiseAbs().maxCoeff();
        if (!(norm > 1e-12 * std::max(1.0, magnitude) * root_n)) throw ConstantColumn(static_cast<std::size_t>(j));
        const double scale = norm / root_n;
        out.x.col(j) = centred / scale;
        out.column_means[j] = mean;
        out.column_scales[j] = scale;
    }
    out.y_mean = data.y.mean();
    out.y = data.y.array() - out.y_mean;
    out.standardized = true;
    return out;
}

/// Coefficients mapped back to the raw scale, plus the intercept that makes
/// x_raw * beta + intercept reproduce x_std * beta + y_mean.
struct RawScaleFit {
    Vector beta;
    double intercept = 0.0;
};

inline RawScaleFit destandardize_coefficients(const Coefficients& coef, const Dataset& data) {
    if (!data.standardized) throw NotStandardized();
    if (coef.size() != data.p()) throw DimensionMismatch("coefficient length differs from p");
    RawScaleFit out;
    out.beta = coef.beta.cwiseQuotient(data.column_scales);
    out.intercept = data.y_mean - data.column_means.dot(out.beta);
    return out;
}

inline double residual_ss(const Matrix& x, const Vector& y, const Vector& beta) {
    if (x.cols() != beta.size() || x.rows() != y.size())
        throw DimensionMismatch("residual_ss: dimensions disagree");
    return (y - x * beta).squaredNorm();
}

inline double residual_ss(const Dataset& data, const Coefficients& coef) {
    return residual_ss(data.x, data.y, coef.beta);
}

/// Sample variance with the n - 1 denominator.
inline double sample_variance(const Vector& v) {
    const double mean = v.mean();
    return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

/// Copy of the selected rows, in the given order.
inline Dataset select_rows(const Dataset& data, const std::vector<Index>& rows) {
    Matrix x(static_cast<Index>(rows.size()), data.p());
    Vector y(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        x.row(static_cast<Index>(i)) = data.x.row(rows[i]);
        y[static_cast<Index>(i)] = data.y[rows[i]];
    }
    return Dataset::raw(std::move(x), std::move(y));
}

} // namespace sslvar
