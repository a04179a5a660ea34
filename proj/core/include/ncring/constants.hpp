#pragma once

#include <numbers>

namespace ncring {

/// SI physical constants. Defaults are the CODATA-2018 exact values for
/// h and e; hbar is derived from h so that h = 2*pi*hbar holds to rounding.
struct PhysicalConstants {
    double h = 6.62607015e-34;                       // J s
    double hbar = 6.62607015e-34 / (2.0 * std::numbers::pi); // J s
    double e = 1.602176634e-19;                      // C
    double m_e = 9.1093837015e-31;                   // kg

    /// Magnetic flux quantum h/e (Wb).
    [[nodiscard]] constexpr double phi0() const noexcept { return h / e; }
};

inline constexpr PhysicalConstants codata2018{};

} // namespace ncring
