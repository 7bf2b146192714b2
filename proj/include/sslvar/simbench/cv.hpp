#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "sslvar/baselines.hpp"
#include "sslvar/core/dataset.hpp"
#include "sslvar/core/errors.hpp"
#include "sslvar/core/rng.hpp"

namespace sslvar::simbench {

/// Fits on raw training rows and returns a raw-scale predictor.
using FitFunction = std::function<RawScaleFit(const Dataset& train)>;

/// Wraps a solver for standardized data: standardize the training rows, fit,
/// map the coefficients back.
inline FitFunction on_standardized(std::function<Coefficients(const Dataset& train_std)> solver) {
    return [solver = std::move(solver)](const Dataset& train) {
        const Dataset std_train = standardize(train);
        return destandardize_coefficients(solver(std_train), std_train);
    };
}

/// Seeded random partition into k folds whose sizes differ by at most one.
inline std::vector<int> fold_assignment(Index n, int k, RngSpec rng_spec) {
    if (k < 2 || n < k) throw DomainError("cross-validation needs 2 <= k <= n");
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    Rng rng(rng_spec, StreamPurpose::Folds);
    rng.shuffle(order);
    std::vector<int> fold(static_cast<std::size_t>(n));
    for (std::size_t pos = 0; pos < order.size(); ++pos) fold[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos % k);
    return fold;
}

namespace detail {

inline std::vector<Index> rows_where(const std::vector<int>& fold, int k, bool in_fold) {
    std::vector<Index> rows;
    for (std::size_t i = 0; i < fold.size(); ++i)
        if ((fold[i] == k) == in_fold) rows.push_back(static_cast<Index>(i));
    return rows;
}

inline double held_out_error(const Dataset& data, const std::vector<Index>& rows, const RawScaleFit& fit) {
    double sse = 0.0;
    for (const Index i : rows) {
        const double r = data.y[i] - data.x.row(i).dot(fit.beta) - fit.intercept;
        sse += r * r;
    }
    return sse;
}

} // namespace detail

/// (1/K) sum_k sum_{i in fold k} (y_i - yhat_i^{(-k)})^2 on the raw scale.
inline double kfold_cv(const Dataset& data, const FitFunction& fit, int k, RngSpec rng_spec) {
    const std::vector<int> fold = fold_assignment(data.n(), k, rng_spec);
    double total = 0.0;
    for (int f = 0; f < k; ++f) {
        const RawScaleFit model = fit(select_rows(data, detail::rows_where(fold, f, false)));
        total += detail::held_out_error(data, detail::rows_where(fold, f, true), model);
    }
    return total / k;
}

struct LassoCvResult {
    std::vector<double> lambdas;  // per-observation penalties, decreasing
    std::vector<double> cv_error; // same length
    std::size_t best = 0;
    Coefficients coef;            // refit on the full standardized data
};

/// Lasso tuned by K-fold CV over a log grid of per-observation penalties
/// (objective-scale penalty = rows * lambda). The grid comes from the full data.
inline LassoCvResult cv_lasso(const Dataset& data, int k, RngSpec rng_spec, int grid_size = 100, double ratio = 0.01) {
    const Dataset full = standardize(data);
    const double nn = static_cast<double>(full.n());
    LassoCvResult out;
    for (const double lam : baselines::lasso_lambda_grid(full, grid_size, ratio)) out.lambdas.push_back(lam / nn);
    out.cv_error.assign(out.lambdas.size(), 0.0);

    const std::vector<int> fold = fold_assignment(data.n(), k, rng_spec);
    for (int f = 0; f < k; ++f) {
        const auto test_rows = detail::rows_where(fold, f, true);
        const Dataset train = standardize(select_rows(data, detail::rows_where(fold, f, false)));
        const double rows = static_cast<double>(train.n());
        Vector warm = Vector::Zero(train.p());
        for (std::size_t l = 0; l < out.lambdas.size(); ++l) {
            warm = baselines::lasso_cd(train, rows * out.lambdas[l], 1e-7, 10000, &warm).coef.beta;
            out.cv_error[l] += detail::held_out_error(data, test_rows, destandardize_coefficients(Coefficients(warm), train));
        }
    }
    for (double& e : out.cv_error) e /= k;
    out.best = static_cast<std::size_t>(std::min_element(out.cv_error.begin(), out.cv_error.end()) - out.cv_error.begin());

    Vector warm = Vector::Zero(full.p());
    for (std::size_t l = 0; l <= out.best; ++l)
        warm = baselines::lasso_cd(full, nn * out.lambdas[l], 1e-7, 10000, &warm).coef.beta;
    out.coef = Coefficients(std::move(warm));
    return out;
}

} // namespace sslvar::simbench
