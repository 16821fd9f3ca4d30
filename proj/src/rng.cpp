#include "dsparse/rng.hpp"

#include <cmath>
#include <numbers>

namespace dsparse {

std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash64(std::uint64_t seed, std::uint64_t s) noexcept
{
    return mix64(mix64(seed) ^ (s * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

Substream::Substream(std::uint64_t run_seed, std::uint64_t sensor, Purpose purpose)
    : engine_(mix64(hash64(run_seed, sensor) ^ mix64(static_cast<std::uint64_t>(purpose))))
{
}

double Substream::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Substream::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
}

double Substream::normal(double variance)
{
    return std::sqrt(variance) * normal();
}

} // namespace dsparse
