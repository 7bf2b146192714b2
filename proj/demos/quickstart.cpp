// Fits the spike-and-slab lasso with unknown variance to one simulated data
// set and prints the selected predictors and the variance estimate.

#include <cstdio>

#include "sslvar/simbench/scenario.hpp"
#include "sslvar/ssl/solver.hpp"

int main() {
    using namespace sslvar;

    const simbench::SimScenario scenario; // n = 100, p = 1000, six signals, sigma^2 = 3
    const Dataset raw = simbench::generate_dataset(scenario, 0);
    const Dataset data = standardize(raw);

    const ssl::SslConfig config = ssl::SslConfig::defaults_for(data.p());
    const ssl::SslFit fit = ssl::fit_ssl(data, config);
    const RawScaleFit coef = destandardize_coefficients(fit.coef, data);

    std::printf("selected %ld of %ld predictors\n", static_cast<long>(fit.coef.q_hat()), static_cast<long>(data.p()));
    for (const Index j : fit.coef.support())
        std::printf("  beta[%4ld] = %8.4f   (truth %6.2f)\n", static_cast<long>(j), coef.beta[j], scenario.beta_true()[j]);
    std::printf("sigma^2: %.4f (last update), %.4f (df-adjusted), truth %.1f\n", fit.sigma2_hat, fit.sigma2_adj,
                scenario.sigma2_true);
    std::printf("theta: %.4f\n", fit.theta_hat);
    return 0;
}
