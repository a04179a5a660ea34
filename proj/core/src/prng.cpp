#include "ncring/prng.hpp"

#include <cmath>
#include <numbers>

namespace ncring {

double standard_normal(std::uint64_t seed, std::uint64_t index) noexcept
{
    // u1 in (0, 1] keeps the logarithm finite.
    const double u1 = 1.0 - to_unit_interval(splitmix64(seed, 2 * index));
    const double u2 = to_unit_interval(splitmix64(seed, 2 * index + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace ncring
