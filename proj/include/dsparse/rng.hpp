#pragma once

#include <cstdint>
#include <random>

namespace dsparse {

/// splitmix64 finalizer. Pinned: changing it changes every derived seed.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for repeat `s` of an experiment seeded with `seed`.
std::uint64_t hash64(std::uint64_t seed, std::uint64_t s) noexcept;

enum class Purpose : std::uint64_t {
    regressor = 1,
    observation = 2,
};

/**
 * Per-(sensor, purpose) random stream.
 *
 * Engine output is std::mt19937_64 (bit-specified by the standard); the
 * uniform and Gaussian transforms are done here rather than with the
 * <random> distributions, whose algorithms vary between standard libraries.
 */
class Substream {
public:
    Substream(std::uint64_t run_seed, std::uint64_t sensor, Purpose purpose);
    explicit Substream(std::uint64_t raw_seed) : engine_(raw_seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform on (0, 1]; safe as a log argument.
    double uniform_open0() { return 1.0 - uniform(); }

    /// Standard normal by Box-Muller; caches the second variate.
    double normal();

    double normal(double variance);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace dsparse
