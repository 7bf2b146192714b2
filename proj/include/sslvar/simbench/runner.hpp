#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "sslvar/simbench/methods.hpp"
#include "sslvar/simbench/metrics.hpp"
#include "sslvar/simbench/scenario.hpp"

namespace sslvar::simbench {

struct ReplicationRecord {
    std::string method;
    std::uint64_t replication = 0;
    bool failed = false;
    std::string error; // what() of the failure, empty on success
    SelectionMetrics metrics;
};

struct MetricSummary {
    double mean = 0.0;
    double median = 0.0;
    double se = 0.0; // sample sd / sqrt(count)
};

/// Column order used by every report writer.
inline const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names{"ham", "pe", "mcc", "tp", "fp", "fn", "tn", "q_hat",
                                                "correct_model", "sigma2_estimate", "runtime_seconds"};
    return names;
}

inline std::vector<double> metric_values(const SelectionMetrics& m) {
    const auto d = [](Index v) { return static_cast<double>(v); };
    return {d(m.ham), m.pe, m.mcc, d(m.tp), d(m.fp), d(m.fn), d(m.tn), d(m.q_hat),
            m.correct_model ? 1.0 : 0.0, m.sigma2_estimate, m.runtime_seconds};
}

struct MethodSummary {
    std::string method;
    Index successes = 0;
    Index failures = 0;
    Index correct_count = 0;    // COR as a count over successful replications
    double correct_percent = 0; // and as a percentage
    std::vector<MetricSummary> metrics; // aligned with metric_names()
};

struct BenchReport {
    SimScenario scenario;
    std::vector<std::string> methods;
    int replications = 0;
    std::vector<ReplicationRecord> records; // method-major, then replication
    std::vector<MethodSummary> summaries;

    const MethodSummary& summary(const std::string& method) const {
        for (const auto& s : summaries)
            if (s.method == method) return s;
        throw DomainError("no summary for method '" + method + "'");
    }
    double mean(const std::string& method, const std::string& metric) const { return lookup(method, metric).mean; }
    double median(const std::string& method, const std::string& metric) const {
        return lookup(method, metric).median;
    }

private:
    const MetricSummary& lookup(const std::string& method, const std::string& metric) const {
        const auto& names = metric_names();
        const auto it = std::find(names.begin(), names.end(), metric);
        if (it == names.end()) throw DomainError("unknown metric '" + metric + "'");
        return summary(method).metrics[static_cast<std::size_t>(it - names.begin())];
    }
};

/// Mean, median and SE from values sorted first, so the result does not depend
/// on the order replications finished in. Non-finite values are skipped.
inline MetricSummary summarize(std::vector<double> values) {
    values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }),
                 values.end());
    MetricSummary s;
    if (values.empty()) return {std::nan(""), std::nan(""), std::nan("")};
    std::sort(values.begin(), values.end());
    const double count = static_cast<double>(values.size());
    double sum = 0.0;
    for (const double v : values) sum += v;
    s.mean = sum / count;
    const std::size_t mid = values.size() / 2;
    s.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    if (values.size() > 1) {
        double ss = 0.0;
        for (const double v : values) ss += (v - s.mean) * (v - s.mean);
        s.se = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
    }
    return s;
}

struct RunOptions {
    int parallelism = 1;
    bool timing = false; // record wall-clock runtimes (otherwise 0, keeping reports byte-identical)
};

/// Replication r draws its data from stream scenario.seed.stream_id + r and
/// runs every method on it. Failures are recorded, not thrown.
inline BenchReport run_replications(const SimScenario& scenario, const std::vector<MethodSpec>& methods, int reps,
                                    const RunOptions& options = {}) {
    scenario.validate();
    if (reps < 2) throw DomainError("need at least 2 replications");
    if (methods.empty()) throw DomainError("method list is empty");
    const Vector beta0 = scenario.beta_true();
    const std::size_t m = methods.size();

    // slots[r * m + k] holds method k on replication r
    std::vector<ReplicationRecord> slots(static_cast<std::size_t>(reps) * m);
    std::atomic<int> next{0};
    const auto worker = [&] {
        for (int r = next++; r < reps; r = next++) {
            const auto rep = static_cast<std::uint64_t>(r);
            const Dataset raw = generate_dataset(scenario, rep);
            const RngSpec rng{scenario.seed.seed, scenario.seed.stream_id + rep};
            for (std::size_t k = 0; k < m; ++k) {
                ReplicationRecord& rec = slots[static_cast<std::size_t>(r) * m + k];
                rec.method = methods[k].name();
                rec.replication = rep;
                try {
                    const MethodOutcome out = run_method(methods[k], raw, rng);
                    rec.metrics = compute_metrics(out.fit.beta, beta0, raw.x, out.sigma2_estimate,
                                                  options.timing ? out.runtime_seconds : 0.0);
                } catch (const std::exception& e) {
                    rec.failed = true;
                    rec.error = e.what();
                }
            }
        }
    };
    const int threads = std::max(1, std::min(options.parallelism, reps));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    BenchReport report;
    report.scenario = scenario;
    report.replications = reps;
    for (const auto& method : methods) report.methods.push_back(method.name());
    for (std::size_t k = 0; k < m; ++k)
        for (int r = 0; r < reps; ++r) report.records.push_back(slots[static_cast<std::size_t>(r) * m + k]);

    const std::size_t metric_count = metric_names().size();
    for (std::size_t k = 0; k < m; ++k) {
        MethodSummary s;
        s.method = report.methods[k];
        std::vector<std::vector<double>> columns(metric_count);
        for (int r = 0; r < reps; ++r) {
            const ReplicationRecord& rec = report.records[k * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)];
            if (rec.failed) {
                ++s.failures;
                continue;
            }
            ++s.successes;
            if (rec.metrics.correct_model) ++s.correct_count;
            const auto values = metric_values(rec.metrics);
            for (std::size_t c = 0; c < metric_count; ++c) columns[c].push_back(values[c]);
        }
        s.correct_percent = s.successes > 0 ? 100.0 * static_cast<double>(s.correct_count) / static_cast<double>(s.successes) : 0.0;
        for (auto& column : columns) s.metrics.push_back(summarize(std::move(column)));
        report.summaries.push_back(std::move(s));
    }
    return report;
}

} // namespace sslvar::simbench
