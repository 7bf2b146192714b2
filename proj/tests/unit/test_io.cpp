#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "sslvar/io/dispatch.hpp"

using namespace sslvar;
using namespace sslvar::io;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

Dataset sparse_problem(std::uint64_t seed, Index n, Index p) {
    oracle::TestRng t(seed);
    Vector b = Vector::Zero(p);
    b.head(2) << 2.5, -2.0;
    const Matrix x = t.matrix(n, p);
    return Dataset::raw(x, x * b + t.vector(n));
}

} // namespace

TEST(FitRequest, DefaultsAreSsl) {
    const FitRequest r = parse_fit_request(Json::object(), 40);
    EXPECT_EQ(r.algorithm, Algorithm::Ssl);
    EXPECT_EQ(r.ssl.lambda0_ladder.size(), 100u);
    EXPECT_DOUBLE_EQ(r.ssl.b, 40.0);
}

TEST(FitRequest, SslKeys) {
    const Json doc = Json::parse(R"({"lambda0_ladder": "1:50:1", "variance_mode": {"kind": "fixed", "sigma2": 2.5},
        "sigma_init_policy": {"kind": "explicit", "sigma2": 0.7}, "max_iter": 77, "randomize_order": true})");
    const FitRequest r = parse_fit_request(doc, 10);
    EXPECT_EQ(r.ssl.lambda0_ladder.size(), 50u);
    EXPECT_EQ(r.ssl.variance_mode.kind, ssl::VarianceKind::Fixed);
    EXPECT_DOUBLE_EQ(r.ssl.variance_mode.sigma2, 2.5);
    EXPECT_EQ(r.ssl.sigma_init_policy.kind, ssl::SigmaInitPolicy::Kind::Explicit);
    EXPECT_EQ(r.ssl.max_iter, 77);
    EXPECT_TRUE(r.ssl.randomize_order);
    EXPECT_EQ(parse_fit_request(Json::parse(R"({"variance_mode": "scaled"})"), 5).ssl.variance_mode.kind,
              ssl::VarianceKind::Scaled);
    EXPECT_EQ(parse_fit_request(Json::parse(R"({"lambda0_ladder": [1, 5, 9]})"), 5).ssl.lambda0_ladder,
              (std::vector<double>{1, 5, 9}));
}

TEST(FitRequest, RejectsUnknownAndInapplicableKeys) {
    EXPECT_THROW(parse_fit_request(Json::parse(R"({"lambda_zero": 3})"), 5), DomainError);
    EXPECT_THROW(parse_fit_request(Json::parse(R"({"algorithm": "zellner", "tau2": 3})"), 5), DomainError);
    EXPECT_THROW(parse_fit_request(Json::parse(R"({"algorithm": "ridge"})"), 5), DomainError);
    EXPECT_THROW(parse_fit_request(Json::parse(R"({"max_iter": 2.5})"), 5), DomainError);
    EXPECT_THROW(parse_fit_request(Json::parse(R"({"variance_mode": "known"})"), 5), DomainError);
    EXPECT_THROW(parse_fit_request(Json::parse(R"({"algorithm": "gibbs", "burn_in": 10, "iterations": 10})"), 5),
                 DomainError);
    EXPECT_THROW(parse_fit_request(Json::array(), 5), DomainError);
}

TEST(FitRequest, OtherAlgorithms) {
    const FitRequest em = parse_fit_request(Json::parse(R"({"algorithm": "conjugate_em", "lambda0": 30})"), 5);
    EXPECT_DOUBLE_EQ(em.conj.lambda0, 30.0);
    const FitRequest g = parse_fit_request(Json::parse(R"({"algorithm": "gibbs", "tau2": 4, "iterations": 300,
        "burn_in": 100})"), 5);
    EXPECT_DOUBLE_EQ(g.tau2, 4.0);
    EXPECT_EQ(g.iterations, 300);
}

TEST(FitJson, SslFields) {
    const Dataset raw = sparse_problem(61, 50, 80);
    const FitOutcome out = run_fit(parse_fit_request(Json::object(), 80), raw, {1, 0});
    const Json doc = fit_json(out, 50);
    EXPECT_EQ(doc["algorithm"], "ssl");
    EXPECT_TRUE(doc["converged"].get<bool>());
    EXPECT_EQ(doc["q_hat"].get<int>(), static_cast<int>(doc["coefficients"].size()));
    EXPECT_TRUE(doc.contains("sigma2_adj"));
    EXPECT_TRUE(doc.contains("theta"));
    EXPECT_EQ(doc["trace"].size(), 100u);
    EXPECT_FALSE(doc.contains("message"));
    for (const auto& c : doc["coefficients"]) EXPECT_NE(c["value"].get<double>(), 0.0);
}

TEST(FitJson, NonConvergenceKeepsPartialTrace) {
    const Dataset raw = sparse_problem(62, 50, 80);
    const FitOutcome out = run_fit(parse_fit_request(Json::parse(R"({"max_iter": 1, "lambda0_ladder": [5]})"), 80), raw, {1, 0});
    EXPECT_FALSE(out.converged);
    const Json doc = fit_json(out, 50);
    EXPECT_TRUE(doc.contains("message"));
    EXPECT_FALSE(doc["trace"].empty());
}

TEST(FitJson, EveryAlgorithmRuns) {
    const Dataset raw = sparse_problem(63, 60, 12);
    for (const auto& [alg, name] : algorithm_names()) {
        Json cfg{{"algorithm", name}};
        if (alg == Algorithm::Gibbs) cfg.update(Json{{"iterations", 200}, {"burn_in", 50}});
        const FitOutcome out = run_fit(parse_fit_request(cfg, 12), raw, {2, 0});
        EXPECT_EQ(out.fit.beta.size(), 12) << name;
        EXPECT_EQ(fit_json(out, 60)["algorithm"], name);
        if (alg == Algorithm::Gibbs) {
            ASSERT_TRUE(out.chain.has_value());
            EXPECT_EQ(out.chain->retained(), 150);
        }
    }
}

TEST(Scenario, RoundTrip) {
    simbench::SimScenario s;
    s.n = 30;
    s.p = 20;
    s.block_size = 5;
    s.nonzero_values = {1.0};
    s.nonzero_positions = {7};
    s.seed = {99, 4};
    const simbench::SimScenario back = parse_scenario(scenario_json(s));
    EXPECT_EQ(scenario_json(back), scenario_json(s));
    EXPECT_THROW(parse_scenario(Json::parse(R"({"rows": 3})")), DomainError);
    EXPECT_THROW(parse_scenario(Json::parse(R"({"p": 10, "block_size": 3})")), DomainError);
}

TEST(ReportCsv, Layout) {
    simbench::SimScenario s;
    s.n = 30;
    s.p = 20;
    s.block_size = 5;
    s.nonzero_values = {2.0, -2.0};
    s.nonzero_positions = {0, 10};
    const auto report = simbench::run_replications(s, simbench::parse_methods("ssl_unknown,scaled_lasso"), 3);
    std::ostringstream out;
    write_report_csv(report, out);
    const auto lines = lines_of(out.str());
    ASSERT_EQ(lines.size(), 1u + 6u + 6u);
    EXPECT_EQ(lines[0], "method,replication,status,ham,pe,mcc,tp,fp,fn,tn,q_hat,correct_model,sigma2_estimate,"
                        "runtime_seconds");
    EXPECT_EQ(lines[1].rfind("ssl_unknown,0,ok,", 0), 0u);
    EXPECT_EQ(lines[4].rfind("scaled_lasso,0,ok,", 0), 0u);
    EXPECT_EQ(lines[7].rfind("ssl_unknown,mean,summary,", 0), 0u);
    EXPECT_EQ(lines[12].rfind("scaled_lasso,se,summary,", 0), 0u);
    for (const auto& line : lines) EXPECT_EQ(std::count(line.begin(), line.end(), ','), 13) << line;

    const Json doc = report_json(report);
    EXPECT_EQ(doc["replications"], 3);
    EXPECT_EQ(doc["methods"][0]["method"], "ssl_unknown");
    EXPECT_TRUE(doc["methods"][1]["metrics"].contains("mcc"));
    EXPECT_TRUE(doc["failures"].empty());
}

TEST(TheoryJson, AllPassedFlag) {
    std::vector<theory::TheoryCheck> checks{{"a", 0.1, 0.2, 0.0, true}, {"b", 0.5, 0.2, 0.0, false}};
    EXPECT_FALSE(theory_json(checks)["all_passed"].get<bool>());
    checks.pop_back();
    const Json doc = theory_json(checks);
    EXPECT_TRUE(doc["all_passed"].get<bool>());
    EXPECT_EQ(doc["checks"][0]["name"], "a");
}

TEST(SparseCoefficients, SkipsZeros) {
    Vector b = Vector::Zero(6);
    b[4] = -1.25;
    const Json doc = sparse_coefficients(b);
    ASSERT_EQ(doc.size(), 1u);
    EXPECT_EQ(doc[0]["index"], 4);
    EXPECT_DOUBLE_EQ(doc[0]["value"].get<double>(), -1.25);
}
