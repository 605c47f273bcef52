#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace cml {

/// splitmix64 step: advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seedable generator with a fixed, platform-independent output sequence.
/// The engine is std::mt19937_64, whose sequence the C++ standard pins down;
/// the distributions are implemented here rather than taken from <random>,
/// whose distribution algorithms differ between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);
    /// Standard normal via the Marsaglia polar method.
    double normal();
    /// Uniform integer in [lo, hi], by rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    bool bernoulli(double prob) { return uniform() < prob; }

    /// Fisher-Yates shuffle driven by uniform_int.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t k = v.size(); k > 1; --k) {
            auto r = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(k) - 1));
            std::swap(v[k - 1], v[r]);
        }
    }

    /// Independent generator derived from (seed, key); the parent is unaffected.
    static Rng substream(std::uint64_t seed, std::uint64_t key);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace cml
