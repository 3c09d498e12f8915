#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace ffp {

/// SplitMix64 finaliser. Used only to derive well-separated engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// What a substream is used for. Each (run seed, agent, purpose) triple gets
/// its own engine, so adding draws for one purpose never shifts another.
enum class Stream : std::uint64_t {
    tie_break = 1,
    observation = 2,
    exploration = 3,
};

/**
Deterministic 64-bit generator (std::mt19937_64, whose output sequence is
fixed by the standard). Uniform draws are computed here rather than through
<random> distributions, which are allowed to differ between standard
libraries.
*/
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    /// Substream for one agent and purpose of a run.
    static SeededRng substream(std::uint64_t run_seed, int agent, Stream purpose) {
        const std::uint64_t mixed =
            splitmix64(splitmix64(run_seed) ^ (0x100000001b3ULL * (static_cast<std::uint64_t>(agent) + 1)))
            ^ splitmix64(static_cast<std::uint64_t>(purpose));
        return SeededRng(mixed);
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    int uniform_int(int n) {
        const auto bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return static_cast<int>(x % bound);
    }

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    const T& pick(std::span<const T> items) {
        return items[static_cast<std::size_t>(uniform_int(static_cast<int>(items.size())))];
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace ffp
