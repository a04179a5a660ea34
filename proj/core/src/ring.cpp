#include "ncring/ring.hpp"

#include "ncring/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace ncring {

void RingConfig::validate() const
{
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw InvalidParameter("radius must be positive and finite");
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw InvalidParameter("mass must be positive and finite");
    if (n_electrons < 1)
        throw InvalidParameter("n_electrons must be at least 1");
    nc.validate();
}

double f_nc(const RingConfig& config)
{
    const double hbar = config.constants.hbar;
    const double a = config.nc.alpha;
    return config.radius * config.radius * config.nc.theta_tilde / (hbar * hbar * a * a);
}

double epsilon0(const RingConfig& config)
{
    const double m_star = effective_gauge(config.nc, config.constants, config.mass).m_star;
    const double hbar = config.constants.hbar;
    return hbar * hbar / (2.0 * m_star * config.radius * config.radius);
}

double current_unit(const RingConfig& config)
{
    return config.constants.e / config.constants.h * epsilon0(config);
}

double level_energy(const RingConfig& config, long long n, double f)
{
    const double fnc = f_nc(config);
    const double k = static_cast<double>(n) + f - fnc;
    const double eps = epsilon0(config);
    return eps * k * k - 0.75 * eps * fnc * fnc;
}

namespace {

// Offset reduced to (-1/2, 1/2]; half-integers map to +1/2.
double reduce_to_zone(double delta) noexcept
{
    return delta - std::ceil(delta - 0.5);
}

// Enumerated offsets use an index window centred on the zone containing
// delta, so the enumeration is valid for any flux, not just |delta| <= 1/2.
struct Enumerated {
    long long shift = 0;   // actual n = m - shift
    long double frac = 0;  // delta - shift
};

Enumerated centre(double delta) noexcept
{
    const double shift = std::round(delta);
    return {static_cast<long long>(shift), static_cast<long double>(delta) - static_cast<long double>(shift)};
}

struct Level {
    long long n;
    long double reduced; // (n + delta)^2 in units of eps0
};

std::vector<Level> lowest_levels(const RingConfig& config, double f, int window_margin)
{
    if (window_margin < 2)
        throw InvalidParameter("window_margin must be at least 2");

    const long long count = config.n_electrons;
    const auto [shift, frac] = centre(f - f_nc(config));
    const long long half = count / 2 + window_margin;

    std::vector<Level> levels;
    levels.reserve(static_cast<std::size_t>(2 * half + 1));
    for (long long m = -half; m <= half; ++m) {
        const long double k = static_cast<long double>(m) + frac;
        levels.push_back({m - shift, k * k});
    }
    std::sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) {
        if (a.reduced != b.reduced)
            return a.reduced < b.reduced;
        if (std::llabs(a.n) != std::llabs(b.n))
            return std::llabs(a.n) < std::llabs(b.n);
        return a.n < b.n;
    });
    levels.resize(static_cast<std::size_t>(count));
    return levels;
}

long double bruteforce_sum(const RingConfig& config, double f, int window_margin)
{
    const auto levels = lowest_levels(config, f, window_margin);
    // Neumaier summation in extended precision.
    long double sum = 0.0L;
    long double comp = 0.0L;
    for (const auto& lvl : levels) {
        const long double t = sum + lvl.reduced;
        if (std::fabs(sum) >= std::fabs(lvl.reduced))
            comp += (sum - t) + lvl.reduced;
        else
            comp += (lvl.reduced - t) + sum;
        sum = t;
    }
    const long double fnc = f_nc(config);
    const long double n = static_cast<long double>(config.n_electrons);
    return static_cast<long double>(epsilon0(config)) * ((sum + comp) - 0.75L * n * fnc * fnc);
}

} // namespace

double fold_to_half_zone(double delta) noexcept
{
    return std::abs(reduce_to_zone(delta));
}

double ground_energy_closed(const RingConfig& config, double f)
{
    const double fnc = f_nc(config);
    const double d = fold_to_half_zone(f - fnc);
    const double n = static_cast<double>(config.n_electrons);
    const double common = n * (d * d - 0.75 * fnc * fnc);
    const double eps = epsilon0(config);
    if (config.odd())
        return eps * ((n * n * n - n) / 12.0 + common);
    return eps * ((n * n * n + 2.0 * n) / 12.0 - n * d + common);
}

std::vector<LevelEnergy> ground_occupation(const RingConfig& config, double f, int window_margin)
{
    const auto levels = lowest_levels(config, f, window_margin);
    const double eps = epsilon0(config);
    const double fnc = f_nc(config);
    std::vector<LevelEnergy> out;
    out.reserve(levels.size());
    for (const auto& lvl : levels)
        out.push_back({lvl.n, eps * static_cast<double>(lvl.reduced) - 0.75 * eps * fnc * fnc});
    return out;
}

double ground_energy_bruteforce(const RingConfig& config, double f, int window_margin)
{
    return static_cast<double>(bruteforce_sum(config, f, window_margin));
}

double persistent_current(const RingConfig& config, double f)
{
    const double d = reduce_to_zone(f - f_nc(config));
    const double n = static_cast<double>(config.n_electrons);
    const double j0 = current_unit(config);
    const double a = std::abs(d);
    const double half_zone = config.odd() ? -2.0 * n * j0 * a : n * j0 - 2.0 * n * j0 * a;
    return d < 0.0 ? -half_zone : half_zone;
}

double persistent_current_numeric(const RingConfig& config, double f, double step)
{
    if (!(step > 0.0 && step <= 1e-4))
        throw DomainError("persistent_current_numeric: step must lie in (0, 1e-4]");

    // The occupied set changes where the top filled level crosses the lowest
    // empty one: integer offsets for even N, half-integer offsets for odd N.
    const double delta = f - f_nc(config);
    const double offset = config.odd() ? 0.5 : 0.0;
    const double shifted = delta - offset;
    const double distance = std::abs(shifted - std::round(shifted));
    if (distance < step)
        throw DomainError("persistent_current_numeric: f +/- step crosses a level crossing");

    const long double up = bruteforce_sum(config, f + step, default_window_margin);
    const long double down = bruteforce_sum(config, f - step, default_window_margin);
    const long double phi0 = config.constants.phi0();
    return static_cast<double>(-(up - down) / (2.0L * static_cast<long double>(step) * phi0));
}

} // namespace ncring
