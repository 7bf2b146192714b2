#pragma once

#include <cmath>

#include "sslvar/core/dataset.hpp"
#include "sslvar/core/errors.hpp"

namespace sslvar::simbench {

struct SelectionMetrics {
    Index ham = 0;
    double pe = 0.0;
    Index tp = 0, fp = 0, fn = 0, tn = 0;
    double mcc = 0.0;
    Index q_hat = 0;
    bool correct_model = false;
    double sigma2_estimate = 0.0;
    double runtime_seconds = 0.0;
};

/// Matthews correlation; 0 when any margin of the confusion table is empty.
inline double matthews(Index tp, Index fp, Index fn, Index tn) {
    const double a = static_cast<double>(tp), b = static_cast<double>(fp);
    const double c = static_cast<double>(fn), d = static_cast<double>(tn);
    const double denom = (a + b) * (a + c) * (d + b) * (d + c);
    if (denom == 0.0) return 0.0;
    return (a * d - b * c) / std::sqrt(denom);
}

/// Support is the set of exactly nonzero entries. PE = ||X beta0 - X beta_hat||^2.
inline SelectionMetrics compute_metrics(const Vector& beta_hat, const Vector& beta0, const Matrix& x,
                                        double sigma2_estimate, double runtime) {
    if (beta_hat.size() != beta0.size() || x.cols() != beta0.size())
        throw DimensionMismatch("compute_metrics: beta_hat, beta0 and x disagree");
    SelectionMetrics m;
    for (Index j = 0; j < beta0.size(); ++j) {
        const bool selected = beta_hat[j] != 0.0, active = beta0[j] != 0.0;
        if (selected && active) ++m.tp;
        else if (selected) ++m.fp;
        else if (active) ++m.fn;
        else ++m.tn;
    }
    m.ham = m.fp + m.fn;
    m.pe = (x * (beta0 - beta_hat)).squaredNorm();
    m.mcc = matthews(m.tp, m.fp, m.fn, m.tn);
    m.q_hat = m.tp + m.fp;
    m.correct_model = m.ham == 0;
    m.sigma2_estimate = sigma2_estimate;
    m.runtime_seconds = runtime;
    return m;
}

} // namespace sslvar::simbench
