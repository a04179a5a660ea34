#pragma once

#include "ncring/constants.hpp"
#include "ncring/phasespace.hpp"

#include <vector>

namespace ncring {

/// A one-dimensional ring of spinless electrons at zero temperature.
/// Flux arguments throughout are in units of the flux quantum phi0.
struct RingConfig {
    double radius = 1e-6;                 // m
    double mass = codata2018.m_e;         // kg, bare electron mass
    long long n_electrons = 1;
    NCParameters nc{};
    PhysicalConstants constants = codata2018;

    /// Throws InvalidParameter on radius <= 0, n_electrons < 1, bad mass or
    /// bad NC parameters.
    void validate() const;

    [[nodiscard]] bool odd() const noexcept { return n_electrons % 2 != 0; }
};

struct FluxPoint {
    double f = 0.0;   // phi / phi0
    double phi = 0.0; // Wb

    [[nodiscard]] static FluxPoint from_quanta(double f, const PhysicalConstants& c = codata2018) noexcept {
        return {f, f * c.phi0()};
    }
};

struct LevelEnergy {
    long long n = 0;
    double energy = 0.0; // J
};

inline constexpr int default_window_margin = 8;

/// Effective flux phi_nc / phi0 = R^2 theta_tilde / (hbar^2 alpha^2).
[[nodiscard]] double f_nc(const RingConfig& config);

/// hbar^2 / (2 m* R^2), m* = m / alpha.
[[nodiscard]] double epsilon0(const RingConfig& config);

/// Current unit J0 = (e/h) epsilon0 (A).
[[nodiscard]] double current_unit(const RingConfig& config);

/// E_n = eps0 (n + f - f_nc)^2 - (3/4) eps0 f_nc^2.
[[nodiscard]] double level_energy(const RingConfig& config, long long n, double f);

/// Reduces delta = f - f_nc to the half zone [0, 1/2]; valid for any f because
/// the ground energy is periodic and even in delta.
[[nodiscard]] double fold_to_half_zone(double delta) noexcept;

/// Closed odd/even ground-state energy, evaluated on the folded offset.
[[nodiscard]] double ground_energy_closed(const RingConfig& config, double f);

/// Lowest N levels by direct enumeration. Ties at degeneracies go to the
/// smaller |n|, then to negative n.
[[nodiscard]] std::vector<LevelEnergy> ground_occupation(const RingConfig& config, double f,
                                                         int window_margin = default_window_margin);

/// Sum of the lowest N levels; the enumeration oracle for ground_energy_closed.
[[nodiscard]] double ground_energy_bruteforce(const RingConfig& config, double f,
                                              int window_margin = default_window_margin);

/// J = -dE_g/dphi from the closed form. On the half zone [0, 1/2]:
/// odd N: -2 N J0 delta; even N: N J0 - 2 N J0 delta. Offsets in (-1/2, 0)
/// use the reflection J(-delta) = -J(delta).
[[nodiscard]] double persistent_current(const RingConfig& config, double f);

/// Central difference of the brute-force ground energy. Throws DomainError if
/// [f - step, f + step] straddles a level crossing of the occupied set.
[[nodiscard]] double persistent_current_numeric(const RingConfig& config, double f, double step);

} // namespace ncring
