#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sslvar/theory.hpp"

using namespace sslvar;
using namespace sslvar::theory;

namespace {

SparseBetaSpec spec_of(Index p, Vector values, double tau2, double sigma0_2) {
    SparseBetaSpec s;
    s.p = p;
    s.q = values.size();
    s.values = std::move(values);
    s.tau2 = tau2;
    s.sigma0_2 = sigma0_2;
    return s;
}

} // namespace

TEST(MarkovBound, ZeroSupportIsZero) {
    EXPECT_DOUBLE_EQ(prop1_markov_bound(spec_of(50, Vector(0), 2.0, 1.0), 0.3), 0.0);
}

TEST(MarkovBound, ClosedForm) {
    const SparseBetaSpec s = spec_of(102, (Vector(3) << 1.0, -3.0, 2.0).finished(), 4.0, 2.0);
    // (3 / 100) * (9 / 4) / (0.5 * 2)
    EXPECT_NEAR(prop1_markov_bound(s, 0.5), 0.0675, 1e-15);
    EXPECT_NEAR(prop1_markov_bound(s, 0.25), 2.0 * prop1_markov_bound(s, 0.5), 1e-15);
}

TEST(MarkovBound, Guards) {
    EXPECT_THROW(prop1_markov_bound(spec_of(2, Vector::Ones(1), 1.0, 1.0), 0.5), DomainError);
    EXPECT_THROW(prop1_markov_bound(spec_of(10, Vector::Zero(1), 1.0, 1.0), 0.5), DomainError);
    EXPECT_THROW(prop1_markov_bound(spec_of(10, Vector::Ones(1), 1.0, 1.0), 0.0), DomainError);
}

TEST(MarkovBound, MonteCarloTailBelowBound) {
    Rng rng({11, 0}, StreamPurpose::MonteCarlo);
    const SparseBetaSpec s = spec_of(60, (Vector(4) << 2.0, -2.0, 1.0, 3.0).finished(), 10.0, 1.0);
    for (const double eps : {0.05, 0.2, 1.0}) {
        const McEstimate mc = prop1_monte_carlo_tail(s, eps, 20000, rng);
        EXPECT_LE(mc.value, prop1_markov_bound(s, eps) + 3.0 * mc.se);
    }
}

TEST(IgTail, ExactValues) {
    EXPECT_NEAR(prop2_exact_tail(4.0, 1.0), 1.0 - std::exp(-4.0), 1e-15);
    EXPECT_NEAR(prop2_exact_tail(4.0, 1.0), 0.98168, 1e-5);
    EXPECT_DOUBLE_EQ(prop2_exact_tail(0.0, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(prop2_exact_tail(1.0, 0.0), 1.0);
    EXPECT_NEAR(prop2_exact_tail(1.0, 1e12), 1e-12, 1e-20);
    EXPECT_THROW(prop2_exact_tail(-1.0, 1.0), DomainError);
}

TEST(IgTail, MonteCarloAgrees) {
    Rng rng({12, 0}, StreamPurpose::MonteCarlo);
    for (const auto& [s, v] : std::vector<std::pair<double, double>>{{4.0, 1.0}, {0.3, 2.0}, {1.0, 1.0}}) {
        const double exact = prop2_exact_tail(s, v);
        const McEstimate mc = ig1_monte_carlo_tail(s, v, 50000, rng);
        EXPECT_NEAR(mc.value, exact, 4.0 * std::sqrt(exact * (1 - exact) / 50000));
    }
}

TEST(PSigma, BoundIsTightWhenSupportIsUniform) {
    // all |beta_j| equal: q min beta^2 equals ||beta||^2
    const PSigmaTail t = p_sigma_prior_tail(4.0 * 2.25, 3.0, 0.5, 2.0, 4.0 * 2.25);
    EXPECT_DOUBLE_EQ(t.tail, t.bound);
    EXPECT_NEAR(t.tail, 1.0 - std::exp(-9.0 / (2 * 3.0 * 0.5 * 2.0)), 1e-15);
}

TEST(PSigma, BoundApproachesOneAndTailDominates) {
    EXPECT_GT(p_sigma_prior_tail(1e4, 1.0, 0.1, 1.0, 1e4).bound, 1.0 - 1e-12);
    oracle::TestRng rng(13);
    for (int k = 0; k < 100; ++k) {
        const Index q = rng.integer(1, 10);
        const Vector v = rng.vector(q).array() + 0.01;
        const double ss = v.squaredNorm(), qk = q * v.cwiseAbs2().minCoeff();
        const PSigmaTail t = p_sigma_prior_tail(ss, rng.uniform(0.1, 10), rng.uniform(0.05, 2), rng.uniform(0.5, 5), qk);
        EXPECT_GE(t.tail, t.bound);
    }
}

TEST(Horseshoe, ZeroBetaIsResponseEnergy) {
    oracle::TestRng rng(14);
    const Dataset d = Dataset::raw(rng.matrix(30, 10), rng.vector(30));
    GlobalLocalSpec spec{1.0, Vector::Ones(10), Vector::Zero(10)};
    EXPECT_NEAR(horseshoe_conditional_sigma(d, spec), d.y.squaredNorm() / 38.0, 1e-12);
}

TEST(Horseshoe, BelowBoundOnRandomCases) {
    oracle::TestRng rng(15);
    for (int k = 0; k < 50; ++k) {
        const Index n = rng.integer(20, 80), p = rng.integer(10, 200), q = rng.integer(1, 5);
        Vector beta = Vector::Zero(p);
        for (Index j = 0; j < q; ++j) beta[j] = rng.uniform(0.5, 3.0);
        const Matrix x = rng.matrix(n, p);
        const Dataset d = Dataset::raw(x, x * beta + rng.vector(n));
        const double m2 = rng.uniform(0.1, 1.0), tau2 = rng.uniform(0.01, 10);
        GlobalLocalSpec spec{tau2, Vector::Constant(p, 1e-6), beta};
        for (Index j = 0; j < q; ++j) spec.lambda2[j] = m2 * rng.uniform(1.0001, 10.0) / tau2;
        const double star = (d.y - x * beta).squaredNorm() / n;
        EXPECT_LE(horseshoe_conditional_sigma(d, spec),
                  horseshoe_bound(star, n, p, q, beta.cwiseAbs2().maxCoeff(), m2) + 1e-12);
    }
}

TEST(Horseshoe, VanishesWhenPDominates) {
    oracle::TestRng rng(16);
    const Index n = 100, p = 2000;
    Vector beta = Vector::Zero(p);
    beta.head(20).setConstant(2.0);
    const Matrix x = rng.matrix(n, p);
    const Dataset d = Dataset::raw(x, x * beta + std::sqrt(3.0) * rng.vector(n));
    GlobalLocalSpec spec{1.0, Vector::Constant(p, 1e-6), beta};
    spec.lambda2.head(20).setConstant(10.0);
    const double star = (d.y - x * beta).squaredNorm() / n;
    EXPECT_LT(horseshoe_conditional_sigma(d, spec), 0.2 * star);
}

TEST(Horseshoe, Guards) {
    const Dataset d = Dataset::raw(Matrix::Ones(5, 2), Vector::Ones(5));
    EXPECT_THROW(horseshoe_conditional_sigma(d, {1.0, Vector::Ones(3), Vector::Zero(2)}), DimensionMismatch);
    EXPECT_THROW(horseshoe_conditional_sigma(d, {1.0, Vector::Zero(2), Vector::Zero(2)}), DomainError);
}

TEST(TheorySuite, AllChecksPassAtDefaultSettings) {
    const auto checks = run_theory_suite();
    ASSERT_EQ(checks.size(), 5u);
    for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << " value=" << c.value << " ref=" << c.reference;
}
