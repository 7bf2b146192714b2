#pragma once

#include <cstdint>
#include <vector>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/seed_seq.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "sslvar/core/dataset.hpp"

namespace sslvar {

/// Address of a reproducible random stream.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

/// Named sub-streams so that, e.g., data generation and fold assignment for one
/// replication never share draws.
enum class StreamPurpose : std::uint32_t {
    Data = 0,
    Folds = 1,
    Sampler = 2,
    MonteCarlo = 3,
};

/// Random engine bound to an RngSpec. Boost distributions are used throughout
/// because their output is specified, unlike the std:: ones.
class Rng {
public:
    explicit Rng(RngSpec spec, StreamPurpose purpose = StreamPurpose::Data) {
        const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
        const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
        std::vector<std::uint32_t> words{lo(spec.seed), hi(spec.seed), lo(spec.stream_id), hi(spec.stream_id),
                                         static_cast<std::uint32_t>(purpose), 0x53534c56u};
        boost::random::seed_seq seq(words.begin(), words.end());
        engine_.seed(seq);
    }

    double normal() { return normal_(engine_); }

    double uniform() { return uniform_(engine_); }

    /// Gamma(shape, scale).
    double gamma(double shape, double scale) {
        boost::random::gamma_distribution<double> dist(shape, scale);
        return dist(engine_);
    }

    /// Inverse-gamma with density proportional to x^{-shape-1} exp(-scale / x).
    double inverse_gamma(double shape, double scale) { return scale / gamma(shape, 1.0); }

    /// Uniform integer on [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        boost::random::uniform_int_distribution<std::int64_t> dist(lo, hi);
        return dist(engine_);
    }

    Vector normal_vector(Index size) {
        Vector v(size);
        for (Index i = 0; i < size; ++i) v[i] = normal();
        return v;
    }

    /// Fisher-Yates shuffle driven by this engine.
    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto k = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(items[i - 1], items[k]);
        }
    }

private:
    boost::random::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
    boost::random::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace sslvar
