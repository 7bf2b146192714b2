// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sslvar/baselines.hpp"
#include "sslvar/conjugate_em.hpp"
#include "sslvar/io/serialize.hpp"
#include "sslvar/ridge.hpp"
#include "sslvar/simbench/runner.hpp"
#include "sslvar/ssl/solver.hpp"
#include "sslvar/theory.hpp"

using namespace sslvar;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};
std::map<int, Outcome> outcomes;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Progress goes to stderr as criteria finish; the verdict lines are printed in order at the end.
void report(int id, bool pass, const std::string& detail) {
    std::fprintf(stderr, "[done] criterion %d: %s\n", id, pass ? "PASS" : "FAIL");
    outcomes[id] = {pass, detail};
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0, double e = 0, double f = 0) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, a, b, c, d, e, f);
    return buf;
}

constexpr int kReps = 50;

// --- 1 ---------------------------------------------------------------------

void criterion1() {
    const auto start = Clock::now();
    const simbench::SimScenario scenario = simbench::SimScenario::ridge_study();
    const double tau2 = 100.0, g = 100.0;
    std::vector<double> ls, conj, zell, gibbs;
    for (int r = 0; r < kReps; ++r) {
        const Dataset d = simbench::generate_dataset(scenario, static_cast<std::uint64_t>(r));
        ls.push_back(ridge::least_squares(d).sigma2_estimate);
        conj.push_back(ridge::conjugate_ridge(d, tau2).sigma2_estimate);
        zell.push_back(ridge::zellner(d, g).sigma2_estimate);
        gibbs.push_back(ridge::gibbs_independent_ridge(d, tau2, 5000, 1000, {scenario.seed.seed, static_cast<std::uint64_t>(r)})
                            .sigma2_mean());
    }
    const double t = seconds_since(start);
    const double m_ls = median(ls), m_conj = median(conj), m_zell = median(zell), m_gibbs = median(gibbs);
    const bool pass = m_conj < 0.6 && m_zell < 0.9 && m_gibbs >= 2.3 && m_gibbs <= 3.7 && m_ls >= 2.3 && m_ls <= 3.7 &&
                      t < 120.0;
    report(1, pass,
           fmt("median sigma2: conjugate %.3f (<0.6), zellner %.3f (<0.9), gibbs %.3f ([2.3,3.7]), "
               "least-squares %.3f ([2.3,3.7]); %.1f s (<120)",
               m_conj, m_zell, m_gibbs, m_ls, t));
}

// --- 2, 3, 6, 10 -----------------------------------------------------------

std::string report_csv(const simbench::BenchReport& r) {
    std::ostringstream out;
    io::write_report_csv(r, out);
    return out.str();
}

void benchmark_criteria() {
    const simbench::SimScenario scenario;
    const auto methods =
        simbench::parse_methods("ssl_unknown,ssl_fixed:3,ssl_fixed:1,scaled_ssl,scaled_lasso,lasso");

    const auto start = Clock::now();
    const simbench::BenchReport serial = simbench::run_replications(scenario, methods, kReps);
    const double t = seconds_since(start);

    std::string failed_methods;
    for (const auto& s : serial.summaries)
        if (s.failures > 0) failed_methods += " " + s.method + "(" + std::to_string(s.failures) + " failed)";

    // 2
    const double ham_u = serial.mean("ssl_unknown", "ham"), mcc_u = serial.mean("ssl_unknown", "mcc");
    const double fp_u = serial.mean("ssl_unknown", "fp");
    const double ham_f3 = serial.mean("ssl_fixed:3", "ham"), ham_f1 = serial.mean("ssl_fixed:1", "ham");
    const double fp_lasso = serial.mean("lasso", "fp");
    const bool a = ham_u <= 2.5, b = mcc_u >= 0.82, c = fp_u <= 1.5, d = ham_f3 <= ham_u + 0.7,
               e = ham_f1 >= 2.0 * ham_u, f = fp_lasso >= 15.0;
    std::string detail = fmt("ssl_unknown HAM %.2f (<=2.5) MCC %.3f (>=0.82) FP %.2f (<=1.5); ", ham_u, mcc_u, fp_u);
    detail += fmt("ssl_fixed:3 HAM %.2f (<= %.2f); ", ham_f3, ham_u + 0.7);
    detail += fmt("ssl_fixed:1 HAM %.2f (>= %.2f); lasso FP %.2f (>=15); %.0f s (<1800)", ham_f1, 2.0 * ham_u, fp_lasso, t);
    if (!failed_methods.empty()) detail += ";" + failed_methods;
    report(2, a && b && c && d && e && f && t < 1800.0 && failed_methods.empty(), detail);

    // 3
    const double s_u = serial.median("ssl_unknown", "sigma2_estimate");
    const double s_scaled = serial.median("scaled_ssl", "sigma2_estimate");
    const double s_sl = serial.median("scaled_lasso", "sigma2_estimate");
    report(3, s_u >= 2.55 && s_u <= 3.2 && s_scaled >= 2.4 && s_scaled <= 3.1 && s_scaled <= s_u && s_sl >= 4.0,
           fmt("median sigma2: ssl_unknown adj %.3f ([2.55,3.2]), scaled_ssl %.3f ([2.4,3.1], <= unknown), "
               "scaled_lasso df-corrected %.3f (>=4.0)",
               s_u, s_scaled, s_sl));

    // 6: the benchmark fits are deterministic, so refitting reproduces them exactly
    int checked = 0, passed = 0;
    double worst_resid = 0.0, worst_excess = -1e300;
    for (int r = 0; r < kReps; ++r) {
        const auto rep = static_cast<std::uint64_t>(r);
        const Dataset data = standardize(simbench::generate_dataset(scenario, rep));
        for (const ssl::VarianceMode mode : {ssl::VarianceMode::unknown(), ssl::VarianceMode::fixed(3.0),
                                             ssl::VarianceMode::fixed(1.0), ssl::VarianceMode::scaled()}) {
            ssl::SslConfig config = ssl::SslConfig::defaults_for(data.p());
            config.variance_mode = mode;
            ssl::SslFit fit;
            try {
                fit = ssl::fit_ssl(data, config, {scenario.seed.seed, scenario.seed.stream_id + rep});
            } catch (const Error&) {
                continue; // only converged fits carry a certificate
            }
            const ssl::KktReport kkt = ssl::kkt_certificate(data, fit, config);
            ++checked;
            passed += kkt.passes(1e-6);
            worst_resid = std::max(worst_resid, kkt.max_included_residual);
            worst_excess = std::max(worst_excess, kkt.max_excluded_excess);
        }
    }
    report(6, checked > 0 && passed == checked,
           fmt("%.0f/%.0f converged SSL fits certified; max included residual %.2e (<=1e-6), "
               "max |z_j| - Delta over zeros %.2e (<=0)",
               passed, checked, worst_resid, worst_excess));

    // 10
    simbench::RunOptions parallel;
    parallel.parallelism = 2;
    const simbench::BenchReport again = simbench::run_replications(scenario, methods, kReps, parallel);
    const std::string csv_serial = report_csv(serial), csv_parallel = report_csv(again);
    report(10, csv_serial == csv_parallel,
           fmt("serial vs 2-thread report CSV: %.0f vs %.0f bytes, ", static_cast<double>(csv_serial.size()),
               static_cast<double>(csv_parallel.size())) +
               (csv_serial == csv_parallel ? "identical" : "differ"));
}

// --- 4 ---------------------------------------------------------------------

void criterion4() {
    const simbench::SimScenario scenario;
    int below = 0;
    double largest = 0.0;
    for (int r = 0; r < 10; ++r) {
        const Dataset d = standardize(simbench::generate_dataset(scenario, static_cast<std::uint64_t>(r)));
        const conj::ConjEmFit fit = conj::run_conj_em(d, conj::ConjEmConfig::defaults_for(d.p()));
        const double s2 = fit.sigma_hat * fit.sigma_hat;
        below += s2 < 1.0;
        largest = std::max(largest, s2);
    }
    // truth-started instance; a large spike rate keeps the support at the truth
    const Dataset d = standardize(simbench::generate_dataset(scenario, 0));
    const Vector beta_std = scenario.beta_true().cwiseProduct(d.column_scales);
    const double sigma_oracle = std::sqrt(baselines::oracle_sigma2(d, beta_std));
    conj::ConjEmConfig config = conj::ConjEmConfig::defaults_for(d.p());
    config.lambda0 = 500.0;
    const conj::ConjEmFit at_truth = conj::run_conj_em(d, config, &beta_std, sigma_oracle);
    const double closed = conj::sigma_map_at_truth(beta_std.lpNorm<1>(), sigma_oracle, d.n(), d.p(), config.lambda1);
    const double rel = std::abs(at_truth.sigma_hat - closed) / closed;
    report(4, below >= 9 && rel <= 0.10,
           fmt("EM sigma2 < 1 in %.0f/10 runs (>=9), largest %.4f; truth-start sigma %.4f vs closed form %.4f, "
               "rel. diff %.3f (<=0.10)",
               below, largest, at_truth.sigma_hat, closed, rel));
}

// --- 5 ---------------------------------------------------------------------

void criterion5() {
    const auto start = Clock::now();
    std::mt19937_64 gen(5);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    bool all_converged = true;
    for (int k = 0; k < 20; ++k) {
        Matrix x(50, 100);
        for (Index j = 0; j < 100; ++j)
            for (Index i = 0; i < 50; ++i) x(i, j) = z(gen);
        Vector beta = Vector::Zero(100);
        for (Index j = 0; j < 5; ++j) beta[j * 20] = (u(gen) < 0.5 ? -1 : 1) * (1.0 + 2.0 * u(gen));
        Vector y = x * beta;
        for (Index i = 0; i < 50; ++i) y[i] += z(gen);
        const Dataset d = standardize(Dataset::raw(x, y));

        const double lambda1 = 1.0 + 19.0 * u(gen), sigma2 = 0.5 + 2.5 * u(gen);
        ssl::SslConfig config;
        config.lambda1 = lambda1;
        config.lambda0_ladder = {lambda1};
        config.variance_mode = ssl::VarianceMode::fixed(sigma2);
        config.tol_eps = 1e-12;
        config.max_iter = 200000;
        try {
            const ssl::SslFit fit = ssl::fit_ssl(d, config);
            const auto lasso = baselines::lasso_cd(d, sigma2 * lambda1, 1e-13, 200000);
            worst = std::max(worst, (fit.coef.beta - lasso.coef.beta).cwiseAbs().maxCoeff());
        } catch (const Error&) {
            all_converged = false;
        }
    }
    const double t = seconds_since(start);
    report(5, all_converged && worst <= 1e-6 && t < 60.0,
           fmt("max |beta_ssl - beta_lasso| over 20 instances %.2e (<=1e-6); %.1f s (<60)", worst, t) +
               (all_converged ? "" : "; a fit did not converge"));
}

// --- 7 ---------------------------------------------------------------------

void criterion7() {
    const auto start = Clock::now();
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int cases = 0, inside = 0;
    double worst_lower = 1e300, worst_upper = 1e300;
    while (cases < 50) {
        const double theta = 0.01 + 0.98 * u(gen);
        const double sigma2 = 0.5 + 4.5 * u(gen);
        const long n = 20 + static_cast<long>(480 * u(gen));
        const double lambda1 = 0.1 + 1.9 * u(gen);
        const double lambda0 = lambda1 + 2.0 * std::sqrt(static_cast<double>(n)) / std::sqrt(sigma2) * (1.05 + 4.0 * u(gen));
        const ssl::DeltaBounds b = ssl::delta_bounds(theta, sigma2, n, lambda0, lambda1);
        if (!b.hypotheses_hold) continue;
        ++cases;
        const double value = ssl::delta_exact(theta, sigma2, n, lambda0, lambda1);
        // the upper gap can sit below double resolution; allow 1e-9 relative
        const bool ok = value > b.lower && value <= b.upper * (1.0 + 1e-9);
        inside += ok;
        worst_lower = std::min(worst_lower, (value - b.lower) / value);
        worst_upper = std::min(worst_upper, (b.upper - value) / value);
    }
    const double t = seconds_since(start);
    report(7, inside == cases && t < 60.0,
           fmt("%.0f/%.0f cases inside (lower, upper]; smallest rel. gaps: lower %.2e, upper %.2e; %.1f s (<60)",
               inside, cases, worst_lower, worst_upper, t));
}

// --- 8 ---------------------------------------------------------------------

void criterion8() {
    const auto start = Clock::now();
    theory::TheorySuiteOptions options;
    options.draws = 100000;
    const auto checks = theory::run_theory_suite(options);
    const double t = seconds_since(start);
    bool all = true;
    std::string detail;
    for (const auto& c : checks) {
        all = all && c.passed;
        detail += c.name + (c.passed ? "=ok " : "=FAILED ");
    }
    report(8, all && t < 120.0, detail + fmt("; %.1f s (<120)", t));
}

// --- 9 ---------------------------------------------------------------------

void criterion9() {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double theta = 0.01 + 0.98 * u(gen);
        const double lambda1 = 0.1 + 1.9 * u(gen);
        const double lambda0 = lambda1 + 0.5 + 99.5 * u(gen);
        const double b = (u(gen) < 0.5 ? -1 : 1) * (0.05 + 4.95 * u(gen));
        const double h = 1e-6;
        const double fd =
            (ssl::ssl_penalty(b + h, theta, lambda0, lambda1) - ssl::ssl_penalty(b - h, theta, lambda0, lambda1)) / (2 * h);
        worst = std::max(worst, std::abs(fd + std::copysign(ssl::lambda_star(b, theta, lambda0, lambda1), b)));
    }
    report(9, worst <= 1e-5, fmt("max |FD slope + sign(b) lambda*| over 200 points %.2e (<=1e-5)", worst));
}

void guarded(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("threw: ") + e.what());
    }
}

} // namespace

int main() {
    guarded(1, criterion1);
    guarded(4, criterion4);
    guarded(5, criterion5);
    guarded(7, criterion7);
    guarded(8, criterion8);
    guarded(9, criterion9);
    guarded(2, benchmark_criteria); // also reports 3, 6 and 10
    int failures = 0;
    for (int id = 1; id <= 10; ++id) {
        const auto it = outcomes.find(id);
        const Outcome o = it == outcomes.end() ? Outcome{false, "not evaluated"} : it->second;
        std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        failures += !o.pass;
    }
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
