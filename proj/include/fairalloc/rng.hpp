#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fairalloc {

// mt19937_64 plus hand-rolled draws. std::uniform_int_distribution is
// implementation-defined, so every draw here is spelled out to keep outputs
// byte-identical for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Unbiased draw in [0, bound), bound >= 1. Rejection sampling.
    std::uint64_t below(std::uint64_t bound);

    // Inclusive integer range.
    std::int64_t range(std::int64_t lo, std::int64_t hi);

    // Uniform in [0, 1).
    double unit();

    // Fisher-Yates permutation of {0..n-1}.
    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace fairalloc
