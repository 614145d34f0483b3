#pragma once

#include <cstdint>
#include <random>

namespace drcolor {

/// splitmix64 finalizer; used to decorrelate seed material.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Deterministic per-run seed from (master seed, problem index, start index).
/// Deliberately independent of the config index so that every formulation
/// sees the same starting points on a given problem.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t problem_index,
                                 std::uint64_t start_index) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ (problem_index + 0xBF58476D1CE4E5B9ull));
    h = mix64(h ^ (start_index + 0x94D049BB133111EBull));
    return h;
}

/// Seeded generator with implementation-independent draw helpers.
/// mt19937_64 has a standardized sequence; the helpers below avoid
/// std::uniform_*_distribution, whose output is stdlib-specific.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-1, 1).
    double uniform_symmetric() { return 2.0 * uniform01() - 1.0; }

    /// Uniform integer in [0, n) by rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t max = ~std::uint64_t{0};
        const std::uint64_t limit = max - max % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace drcolor
