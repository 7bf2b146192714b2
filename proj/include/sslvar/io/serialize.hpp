#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "sslvar/conjugate_em.hpp"
#include "sslvar/core/errors.hpp"
#include "sslvar/simbench/runner.hpp"
#include "sslvar/simbench/scenario.hpp"
#include "sslvar/ssl/config.hpp"
#include "sslvar/theory.hpp"

namespace sslvar::io {

using Json = nlohmann::ordered_json;

enum class Algorithm { Ssl, ConjugateEm, LeastSquares, ConjugateRidge, Zellner, Gibbs, Lasso, ScaledLasso };

inline const std::vector<std::pair<Algorithm, std::string>>& algorithm_names() {
    static const std::vector<std::pair<Algorithm, std::string>> names{
        {Algorithm::Ssl, "ssl"},
        {Algorithm::ConjugateEm, "conjugate_em"},
        {Algorithm::LeastSquares, "least_squares"},
        {Algorithm::ConjugateRidge, "conjugate_ridge"},
        {Algorithm::Zellner, "zellner"},
        {Algorithm::Gibbs, "gibbs"},
        {Algorithm::Lasso, "lasso"},
        {Algorithm::ScaledLasso, "scaled_lasso"},
    };
    return names;
}

inline std::string to_string(Algorithm a) {
    for (const auto& [kind, name] : algorithm_names())
        if (kind == a) return name;
    return "unknown";
}

inline Algorithm parse_algorithm(const std::string& text) {
    for (const auto& [kind, name] : algorithm_names())
        if (name == text) return kind;
    throw DomainError("unknown algorithm '" + text + "'");
}

/// Everything `fit` and `cv` need, decoded from one JSON config document.
/// Keys that do not apply to the chosen algorithm are rejected.
struct FitRequest {
    Algorithm algorithm = Algorithm::Ssl;
    ssl::SslConfig ssl;
    conj::ConjEmConfig conj;
    double tau2 = 100.0;        // ridge prior variance (conjugate ridge, Gibbs)
    double g = 100.0;           // Zellner g
    int iterations = 5000;      // Gibbs, burn-in included
    int burn_in = 1000;
    double lambda = 0.0;        // lasso per-observation penalty; 0 -> tuned by CV
    int cv_folds = 10;          // folds used to tune the lasso
    double scaled_lambda0 = 0.0; // scaled lasso; 0 -> universal choice
};

namespace detail {

inline double number(const Json& j, const std::string& key) {
    if (!j.is_number()) throw DomainError("config key '" + key + "' must be a number");
    return j.get<double>();
}

inline int integer(const Json& j, const std::string& key) {
    if (!j.is_number_integer()) throw DomainError("config key '" + key + "' must be an integer");
    return j.get<int>();
}

inline bool boolean(const Json& j, const std::string& key) {
    if (!j.is_boolean()) throw DomainError("config key '" + key + "' must be a boolean");
    return j.get<bool>();
}

inline std::vector<double> ladder(const Json& j) {
    if (j.is_string()) return ssl::parse_ladder(j.get<std::string>());
    if (!j.is_array()) throw DomainError("lambda0_ladder must be an array or a \"start:end:step\" string");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number(v, "lambda0_ladder"));
    return out;
}

// "unknown" | "scaled" | {"kind": "fixed", "sigma2": s}
inline ssl::VarianceMode variance_mode(const Json& j) {
    const std::string kind = j.is_string() ? j.get<std::string>() : j.value("kind", std::string{});
    if (kind == "unknown") return ssl::VarianceMode::unknown();
    if (kind == "scaled") return ssl::VarianceMode::scaled();
    if (kind == "fixed") {
        if (!j.is_object() || !j.contains("sigma2")) throw DomainError("fixed variance_mode needs \"sigma2\"");
        return ssl::VarianceMode::fixed(number(j.at("sigma2"), "variance_mode.sigma2"));
    }
    throw DomainError("variance_mode must be unknown, scaled or {\"kind\": \"fixed\", \"sigma2\": ...}");
}

// "scaled_inv_chisq_mode" | {"kind": "explicit", "sigma2": s}
inline ssl::SigmaInitPolicy sigma_init_policy(const Json& j) {
    const std::string kind = j.is_string() ? j.get<std::string>() : j.value("kind", std::string{});
    if (kind == "scaled_inv_chisq_mode") return ssl::SigmaInitPolicy::scaled_inv_chisq_mode();
    if (kind == "explicit") {
        if (!j.is_object() || !j.contains("sigma2")) throw DomainError("explicit sigma_init_policy needs \"sigma2\"");
        return ssl::SigmaInitPolicy::explicit_value(number(j.at("sigma2"), "sigma_init_policy.sigma2"));
    }
    throw DomainError("sigma_init_policy must be scaled_inv_chisq_mode or {\"kind\": \"explicit\", \"sigma2\": ...}");
}

inline Json variance_mode_json(const ssl::VarianceMode& m) {
    switch (m.kind) {
    case ssl::VarianceKind::Unknown: return "unknown";
    case ssl::VarianceKind::Scaled: return "scaled";
    case ssl::VarianceKind::Fixed: return Json{{"kind", "fixed"}, {"sigma2", m.sigma2}};
    }
    return nullptr;
}

/// NaN and infinities become null.
inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

} // namespace detail

/// Decodes a config document for a problem with p predictors. Defaults follow
/// the library defaults (ladder 1..100, b = p).
inline FitRequest parse_fit_request(const Json& doc, Index p) {
    if (!doc.is_object()) throw DomainError("config must be a JSON object");
    FitRequest req;
    req.algorithm = parse_algorithm(doc.value("algorithm", std::string("ssl")));
    req.ssl = ssl::SslConfig::defaults_for(p);
    req.conj = conj::ConjEmConfig::defaults_for(p);

    std::set<std::string> allowed{"algorithm"};
    switch (req.algorithm) {
    case Algorithm::Ssl:
        allowed.insert({"lambda1", "lambda0_ladder", "a", "b", "update_frequency_m", "tol_eps", "max_iter",
                        "variance_mode", "sigma_init_policy", "refine_tol", "refine_max_sweeps", "randomize_order",
                        "reinitialize_on_variance_switch"});
        break;
    case Algorithm::ConjugateEm:
        allowed.insert({"lambda0", "lambda1", "a", "b", "tol", "max_iter", "theta_init", "sigma_init"});
        break;
    case Algorithm::LeastSquares: break;
    case Algorithm::ConjugateRidge: allowed.insert("tau2"); break;
    case Algorithm::Zellner: allowed.insert("g"); break;
    case Algorithm::Gibbs: allowed.insert({"tau2", "iterations", "burn_in"}); break;
    case Algorithm::Lasso: allowed.insert({"lambda", "cv_folds"}); break;
    case Algorithm::ScaledLasso: allowed.insert("lambda0"); break;
    }

    for (const auto& [key, value] : doc.items()) {
        if (!allowed.count(key))
            throw DomainError("config key '" + key + "' does not apply to algorithm '" + to_string(req.algorithm) + "'");
        if (key == "algorithm") continue;
        if (req.algorithm == Algorithm::Ssl) {
            auto& c = req.ssl;
            if (key == "lambda1") c.lambda1 = detail::number(value, key);
            else if (key == "lambda0_ladder") c.lambda0_ladder = detail::ladder(value);
            else if (key == "a") c.a = detail::number(value, key);
            else if (key == "b") c.b = detail::number(value, key);
            else if (key == "update_frequency_m") c.update_frequency_m = detail::integer(value, key);
            else if (key == "tol_eps") c.tol_eps = detail::number(value, key);
            else if (key == "max_iter") c.max_iter = detail::integer(value, key);
            else if (key == "variance_mode") c.variance_mode = detail::variance_mode(value);
            else if (key == "sigma_init_policy") c.sigma_init_policy = detail::sigma_init_policy(value);
            else if (key == "refine_tol") c.refine_tol = detail::number(value, key);
            else if (key == "refine_max_sweeps") c.refine_max_sweeps = detail::integer(value, key);
            else if (key == "randomize_order") c.randomize_order = detail::boolean(value, key);
            else if (key == "reinitialize_on_variance_switch") c.reinitialize_on_variance_switch = detail::boolean(value, key);
        } else if (req.algorithm == Algorithm::ConjugateEm) {
            auto& c = req.conj;
            if (key == "lambda0") c.lambda0 = detail::number(value, key);
            else if (key == "lambda1") c.lambda1 = detail::number(value, key);
            else if (key == "a") c.a = detail::number(value, key);
            else if (key == "b") c.b = detail::number(value, key);
            else if (key == "tol") c.tol = detail::number(value, key);
            else if (key == "max_iter") c.max_iter = detail::integer(value, key);
            else if (key == "theta_init") c.theta_init = detail::number(value, key);
            else if (key == "sigma_init") c.sigma_init = detail::number(value, key);
        } else if (key == "tau2") req.tau2 = detail::number(value, key);
        else if (key == "g") req.g = detail::number(value, key);
        else if (key == "iterations") req.iterations = detail::integer(value, key);
        else if (key == "burn_in") req.burn_in = detail::integer(value, key);
        else if (key == "lambda") req.lambda = detail::number(value, key);
        else if (key == "cv_folds") req.cv_folds = detail::integer(value, key);
        else if (key == "lambda0") req.scaled_lambda0 = detail::number(value, key);
    }

    if (req.algorithm == Algorithm::Ssl) req.ssl.validate();
    if (req.algorithm == Algorithm::ConjugateEm) req.conj.validate();
    if (!(req.tau2 > 0.0)) throw DomainError("tau2 must be positive");
    if (!(req.g > 0.0)) throw DomainError("g must be positive");
    if (req.iterations < 1 || req.burn_in < 0 || req.burn_in >= req.iterations)
        throw DomainError("need 0 <= burn_in < iterations");
    if (req.lambda < 0.0) throw DomainError("lambda must be non-negative");
    if (req.scaled_lambda0 < 0.0) throw DomainError("lambda0 must be non-negative");
    return req;
}

inline Json ssl_config_json(const ssl::SslConfig& c) {
    return Json{{"lambda1", c.lambda1},
                {"lambda0_ladder", c.lambda0_ladder},
                {"a", c.a},
                {"b", c.b},
                {"update_frequency_m", c.update_frequency_m},
                {"tol_eps", c.tol_eps},
                {"max_iter", c.max_iter},
                {"variance_mode", detail::variance_mode_json(c.variance_mode)},
                {"sigma_init_policy",
                 c.sigma_init_policy.kind == ssl::SigmaInitPolicy::Kind::Explicit
                     ? Json{{"kind", "explicit"}, {"sigma2", c.sigma_init_policy.sigma2}}
                     : Json("scaled_inv_chisq_mode")},
                {"refine_tol", c.refine_tol},
                {"refine_max_sweeps", c.refine_max_sweeps},
                {"randomize_order", c.randomize_order},
                {"reinitialize_on_variance_switch", c.reinitialize_on_variance_switch}};
}

/// Coefficients as [{"index": j, "value": b_j}] over the nonzero entries.
inline Json sparse_coefficients(const Vector& beta) {
    Json out = Json::array();
    for (Index j = 0; j < beta.size(); ++j)
        if (beta[j] != 0.0) out.push_back(Json{{"index", j}, {"value", beta[j]}});
    return out;
}

// ---- simulation scenario and report -------------------------------------

/// Scenario document; absent keys keep the defaults.
inline simbench::SimScenario parse_scenario(const Json& doc) {
    if (!doc.is_object()) throw DomainError("scenario must be a JSON object");
    simbench::SimScenario s;
    for (const auto& [key, value] : doc.items()) {
        if (key == "n") s.n = detail::integer(value, key);
        else if (key == "p") s.p = detail::integer(value, key);
        else if (key == "block_size") s.block_size = detail::integer(value, key);
        else if (key == "rho") s.rho = detail::number(value, key);
        else if (key == "sigma2_true") s.sigma2_true = detail::number(value, key);
        else if (key == "nonzero_values") {
            s.nonzero_values.clear();
            for (const auto& v : value) s.nonzero_values.push_back(detail::number(v, key));
        } else if (key == "nonzero_positions") {
            s.nonzero_positions.clear();
            for (const auto& v : value) s.nonzero_positions.push_back(detail::integer(v, key));
        } else if (key == "seed") s.seed.seed = value.get<std::uint64_t>();
        else if (key == "stream_id") s.seed.stream_id = value.get<std::uint64_t>();
        else throw DomainError("unknown scenario key '" + key + "'");
    }
    s.validate();
    return s;
}

inline Json scenario_json(const simbench::SimScenario& s) {
    return Json{{"n", s.n},
                {"p", s.p},
                {"block_size", s.block_size},
                {"rho", s.rho},
                {"nonzero_values", s.nonzero_values},
                {"nonzero_positions", s.nonzero_positions},
                {"sigma2_true", s.sigma2_true},
                {"seed", s.seed.seed},
                {"stream_id", s.seed.stream_id}};
}

inline Json report_json(const simbench::BenchReport& report) {
    Json methods = Json::array();
    const auto& names = simbench::metric_names();
    for (const auto& s : report.summaries) {
        Json metrics = Json::object();
        for (std::size_t c = 0; c < names.size(); ++c)
            metrics[names[c]] = Json{{"mean", detail::finite_or_null(s.metrics[c].mean)},
                                     {"median", detail::finite_or_null(s.metrics[c].median)},
                                     {"se", detail::finite_or_null(s.metrics[c].se)}};
        methods.push_back(Json{{"method", s.method},
                               {"successes", s.successes},
                               {"failures", s.failures},
                               {"correct_count", s.correct_count},
                               {"correct_percent", s.correct_percent},
                               {"metrics", metrics}});
    }
    Json failures = Json::array();
    for (const auto& r : report.records)
        if (r.failed) failures.push_back(Json{{"method", r.method}, {"replication", r.replication}, {"error", r.error}});
    return Json{{"scenario", scenario_json(report.scenario)},
                {"replications", report.replications},
                {"methods", methods},
                {"failures", failures}};
}

/// One row per (method, replication), then mean/median/se rows per method.
/// Failed replications have status "failed" and empty metric fields.
inline void write_report_csv(const simbench::BenchReport& report, std::ostream& out) {
    const auto& names = simbench::metric_names();
    const auto field = [](double v) { return std::isfinite(v) ? csv::format_number(v) : std::string("NA"); };
    out << "method,replication,status";
    for (const auto& name : names) out << ',' << name;
    out << '\n';
    for (const auto& r : report.records) {
        out << r.method << ',' << r.replication << ',' << (r.failed ? "failed" : "ok");
        if (r.failed) {
            for (std::size_t c = 0; c < names.size(); ++c) out << ',';
        } else {
            for (const double v : simbench::metric_values(r.metrics)) out << ',' << field(v);
        }
        out << '\n';
    }
    for (const auto& s : report.summaries) {
        const std::pair<const char*, double simbench::MetricSummary::*> rows[] = {
            {"mean", &simbench::MetricSummary::mean},
            {"median", &simbench::MetricSummary::median},
            {"se", &simbench::MetricSummary::se}};
        for (const auto& [label, member] : rows) {
            out << s.method << ',' << label << ",summary";
            for (const auto& m : s.metrics) out << ',' << field(m.*member);
            out << '\n';
        }
    }
}

// ---- theory ---------------------------------------------------------------

inline Json theory_json(const std::vector<theory::TheoryCheck>& checks) {
    Json rows = Json::array();
    bool all = true;
    for (const auto& c : checks) {
        all = all && c.passed;
        rows.push_back(Json{{"name", c.name},
                            {"value", detail::finite_or_null(c.value)},
                            {"reference", detail::finite_or_null(c.reference)},
                            {"tolerance", detail::finite_or_null(c.tolerance)},
                            {"passed", c.passed}});
    }
    return Json{{"all_passed", all}, {"checks", rows}};
}

} // namespace sslvar::io
