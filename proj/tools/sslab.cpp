// sslab: fit, simulate, cv and check-theory front end.
//
// Exit codes: 0 success, 1 input error, 2 non-convergence (output still
// written) or, for check-theory, a failed check.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "sslvar/core/csv.hpp"
#include "sslvar/io/dispatch.hpp"
#include "sslvar/io/serialize.hpp"
#include "sslvar/simbench/cv.hpp"
#include "sslvar/simbench/runner.hpp"
#include "sslvar/theory.hpp"

namespace {

using sslvar::io::Json;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotConverged = 2;
constexpr std::uint64_t kDefaultSeed = 20190601;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SSLAB_SEED")) {
        const std::string text(env);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw sslvar::DomainError("SSLAB_SEED is not an unsigned integer: '" + text + "'");
        return v;
    }
    return kDefaultSeed;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sslvar::Error("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw sslvar::Error(path + ": " + e.what());
    }
}

// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sslvar::Error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw sslvar::Error("failed writing '" + path + "'");
}

sslvar::Dataset load_dataset(const std::string& x_path, const std::string& y_path) {
    return sslvar::Dataset::raw(sslvar::csv::read_matrix_file(x_path), sslvar::csv::read_vector_file(y_path));
}

struct FitArgs {
    std::string x, y, config, out, chain_csv;
    std::optional<std::uint64_t> seed;
};

int cmd_fit(const FitArgs& a) {
    const sslvar::Dataset raw = load_dataset(a.x, a.y);
    const Json config = a.config.empty() ? Json::object() : read_json_file(a.config);
    const auto req = sslvar::io::parse_fit_request(config, raw.p());
    if (!a.chain_csv.empty() && req.algorithm != sslvar::io::Algorithm::Gibbs)
        throw sslvar::DomainError("--chain-csv applies only to the gibbs algorithm");
    const auto outcome = sslvar::io::run_fit(req, raw, {resolve_seed(a.seed), 0});
    emit(a.out, sslvar::io::fit_json(outcome, raw.n()).dump(2) + "\n");
    if (outcome.chain && !a.chain_csv.empty()) sslvar::ridge::write_chain_csv(*outcome.chain, a.chain_csv);
    if (!outcome.converged) {
        std::cerr << "sslab fit: " << outcome.message << '\n';
        return kNotConverged;
    }
    return kOk;
}

struct SimulateArgs {
    std::string scenario, methods = "ssl_unknown,ssl_fixed:3,scaled_ssl,scaled_lasso,lasso", out, csv;
    int reps = 50;
    int jobs = 1;
    bool timing = false;
    std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a) {
    sslvar::simbench::SimScenario scenario;
    if (!a.scenario.empty()) scenario = sslvar::io::parse_scenario(read_json_file(a.scenario));
    // an explicit --seed or SSLAB_SEED overrides a seed stored in the scenario file
    if (a.seed || std::getenv("SSLAB_SEED") || a.scenario.empty()) scenario.seed.seed = resolve_seed(a.seed);
    const auto methods = sslvar::simbench::parse_methods(a.methods);
    if (a.jobs < 1) throw sslvar::DomainError("--jobs must be at least 1");
    const auto report = sslvar::simbench::run_replications(scenario, methods, a.reps, {a.jobs, a.timing});
    if (!a.csv.empty()) {
        std::ostringstream csv;
        sslvar::io::write_report_csv(report, csv);
        emit(a.csv, csv.str());
    }
    if (!a.out.empty() || a.csv.empty()) emit(a.out, sslvar::io::report_json(report).dump(2) + "\n");
    return kOk;
}

struct CvArgs {
    std::string x, y, config, out;
    int folds = 10;
    std::optional<std::uint64_t> seed;
};

int cmd_cv(const CvArgs& a) {
    const sslvar::Dataset raw = load_dataset(a.x, a.y);
    const Json config = a.config.empty() ? Json::object() : read_json_file(a.config);
    const auto req = sslvar::io::parse_fit_request(config, raw.p());
    const sslvar::RngSpec rng{resolve_seed(a.seed), 0};
    bool converged = true;
    const double error = sslvar::simbench::kfold_cv(
        raw,
        [&](const sslvar::Dataset& train) {
            auto outcome = sslvar::io::run_fit(req, train, rng);
            converged = converged && outcome.converged;
            return outcome.fit;
        },
        a.folds, rng);
    const Json doc{{"algorithm", sslvar::io::to_string(req.algorithm)},
                   {"folds", a.folds},
                   {"n", raw.n()},
                   {"cv_error", error},
                   {"converged", converged}};
    emit(a.out, doc.dump(2) + "\n");
    return converged ? kOk : kNotConverged;
}

struct TheoryArgs {
    std::string out;
    int draws = 100000;
    int specs = 20;
    std::optional<std::uint64_t> seed;
};

int cmd_check_theory(const TheoryArgs& a) {
    sslvar::theory::TheorySuiteOptions options;
    options.draws = a.draws;
    options.random_specs = a.specs;
    options.seed = {resolve_seed(a.seed), 0};
    const auto checks = sslvar::theory::run_theory_suite(options);
    const Json doc = sslvar::io::theory_json(checks);
    emit(a.out, doc.dump(2) + "\n");
    return doc.at("all_passed").get<bool>() ? kOk : kNotConverged;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spike-and-slab lasso with unknown error variance"};
    app.require_subcommand(1);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit one model to CSV data");
    fit_cmd->add_option("--x", fit.x, "Design matrix CSV (headerless)")->required();
    fit_cmd->add_option("--y", fit.y, "Response CSV (one column)")->required();
    fit_cmd->add_option("--config", fit.config, "JSON config; \"algorithm\" selects the estimator");
    fit_cmd->add_option("--out", fit.out, "Output JSON (default stdout)");
    fit_cmd->add_option("--chain-csv", fit.chain_csv, "Gibbs chain CSV");
    fit_cmd->add_option("--seed", fit.seed, "Seed (default $SSLAB_SEED, then 20190601)");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Run the replication benchmark");
    sim_cmd->add_option("--scenario", sim.scenario, "Scenario JSON (default: the standard design)");
    sim_cmd->add_option("--methods", sim.methods, "Comma-separated methods")->capture_default_str();
    sim_cmd->add_option("--reps", sim.reps, "Replications")->capture_default_str();
    sim_cmd->add_option("--jobs", sim.jobs, "Parallel replications")->capture_default_str();
    sim_cmd->add_option("--out", sim.out, "Report JSON");
    sim_cmd->add_option("--csv", sim.csv, "Per-replication CSV with summary rows");
    sim_cmd->add_flag("--timing", sim.timing, "Record runtimes (makes output non-reproducible)");
    sim_cmd->add_option("--seed", sim.seed, "Seed (default $SSLAB_SEED, then 20190601)");

    CvArgs cv;
    auto* cv_cmd = app.add_subcommand("cv", "K-fold cross-validation error of one configured fit");
    cv_cmd->add_option("--x", cv.x, "Design matrix CSV (headerless)")->required();
    cv_cmd->add_option("--y", cv.y, "Response CSV (one column)")->required();
    cv_cmd->add_option("--config", cv.config, "JSON config as for fit");
    cv_cmd->add_option("--folds", cv.folds, "Number of folds")->capture_default_str();
    cv_cmd->add_option("--out", cv.out, "Output JSON (default stdout)");
    cv_cmd->add_option("--seed", cv.seed, "Seed (default $SSLAB_SEED, then 20190601)");

    TheoryArgs th;
    auto* th_cmd = app.add_subcommand("check-theory", "Numerical checks of the prior-concentration results");
    th_cmd->add_option("--draws", th.draws, "Monte Carlo draws per check")->capture_default_str();
    th_cmd->add_option("--specs", th.specs, "Random instances per check")->capture_default_str();
    th_cmd->add_option("--out", th.out, "Output JSON (default stdout)");
    th_cmd->add_option("--seed", th.seed, "Seed (default $SSLAB_SEED, then 20190601)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit);
        if (*sim_cmd) return cmd_simulate(sim);
        if (*cv_cmd) return cmd_cv(cv);
        if (*th_cmd) return cmd_check_theory(th);
    } catch (const std::exception& e) {
        std::cerr << "sslab: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}
