#pragma once

#include <cstdint>
#include <initializer_list>

namespace raptor {

// Counter-based deterministic generator (splitmix64 finalizer over a keyed
// counter). Streams derived from the same (seed, path) are identical on every
// platform and independent of how work is split across threads.
class Rng {
public:
    explicit Rng(std::uint64_t key) : key_(mix(key ^ 0x6a09e667f3bcc909ULL)) {}

    // Derives an independent stream, e.g. Rng::stream(seed, {trial_index}).
    static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
        std::uint64_t key = seed;
        for (std::uint64_t p : path)
            key = mix(key ^ mix(p + 0x9e3779b97f4a7c15ULL));
        return Rng(key);
    }

    std::uint64_t next_u64() {
        return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, bound). Modulo bias is < 2^-53 for the bounds used here.
    std::uint64_t next_below(std::uint64_t bound) {
        return next_u64() % bound;
    }

    bool next_bernoulli(double p) { return next_double() < p; }

private:
    static constexpr std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace raptor
