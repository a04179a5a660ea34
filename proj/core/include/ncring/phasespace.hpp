#pragma once

#include "ncring/constants.hpp"

#include <array>

namespace ncring {

/// Deformation parameters of the 2D noncommutative phase space:
///   [x^, y^] = i theta,  [p^x, p^y] = i theta_tilde.
/// theta in m^2, theta_tilde in kg^2 m^2 s^-2, alpha dimensionless in (0, 1].
struct NCParameters {
    double theta = 0.0;
    double theta_tilde = 0.0;
    double alpha = 1.0;

    /// Throws InvalidParameter unless alpha in (0,1], both thetas finite,
    /// theta_tilde >= 0, and theta*theta_tilde == 0 when alpha == 1.
    void validate() const;
};

/// Real linear combination c_x x + c_y y + c_px p_x + c_py p_y of the
/// canonical phase-space operators.
struct LinearPhaseForm {
    double c_x = 0.0;
    double c_y = 0.0;
    double c_px = 0.0;
    double c_py = 0.0;

    friend constexpr LinearPhaseForm operator+(const LinearPhaseForm& a, const LinearPhaseForm& b) noexcept {
        return {a.c_x + b.c_x, a.c_y + b.c_y, a.c_px + b.c_px, a.c_py + b.c_py};
    }
    friend constexpr LinearPhaseForm operator*(double s, const LinearPhaseForm& a) noexcept {
        return {s * a.c_x, s * a.c_y, s * a.c_px, s * a.c_py};
    }
    friend constexpr bool operator==(const LinearPhaseForm&, const LinearPhaseForm&) = default;
};

namespace canonical {
inline constexpr LinearPhaseForm x{1.0, 0.0, 0.0, 0.0};
inline constexpr LinearPhaseForm y{0.0, 1.0, 0.0, 0.0};
inline constexpr LinearPhaseForm px{0.0, 0.0, 1.0, 0.0};
inline constexpr LinearPhaseForm py{0.0, 0.0, 0.0, 1.0};
} // namespace canonical

/// Rows of the 2D map, in order x^, y^, p^x, p^y.
struct MappedOperators {
    LinearPhaseForm x;
    LinearPhaseForm y;
    LinearPhaseForm px;
    LinearPhaseForm py;
};

/// Effective gauge field seen by a free electron in the deformed phase space.
/// The vector potential is A = (a_coeff * y, -a_coeff * x).
struct GaugeField {
    double a_coeff = 0.0; // T
    /// Magnitude theta_tilde / (e alpha^2 hbar). The curl of A as written is
    /// -2*a_coeff; the magnitude is what enters the ring flux.
    double b_z = 0.0;     // T
    double m_star = 0.0;  // kg
};

/// Coefficients of i in the commutators of the mapped operators.
struct AlgebraReport {
    double comm_xy = 0.0;     // m^2
    double comm_pxpy = 0.0;   // kg^2 m^2 s^-2
    double comm_xpx = 0.0;    // J s
    double comm_xpy = 0.0;    // J s
    /// |comm_xpx - hbar| / hbar. Nonzero for alpha != 1 under the standard
    /// constraint theta*theta_tilde = 2 hbar^2 alpha^2 (1 - alpha^2); the
    /// factor-4 constraint drives it to zero.
    double heisenberg_residual = 0.0;
};

enum class ConstraintVariant {
    standard,          // theta*theta_tilde = 2 hbar^2 alpha^2 (1 - alpha^2)
    heisenberg_closing // theta*theta_tilde = 4 hbar^2 alpha^2 (1 - alpha^2)
};

[[nodiscard]] MappedOperators sw_map(const NCParameters& params,
                                     const PhysicalConstants& constants = codata2018);

/// Canonical symplectic form: hbar * (u_x v_px - u_px v_x + u_y v_py - u_py v_y).
[[nodiscard]] double commutator(const LinearPhaseForm& u, const LinearPhaseForm& v,
                                const PhysicalConstants& constants = codata2018) noexcept;

[[nodiscard]] AlgebraReport verify_algebra(const NCParameters& params,
                                           const PhysicalConstants& constants = codata2018);

/// Solves the constraint for theta. Returns 0 when alpha == 1.
[[nodiscard]] double theta_from_constraint(double alpha, double theta_tilde,
                                           const PhysicalConstants& constants = codata2018,
                                           ConstraintVariant variant = ConstraintVariant::standard);

[[nodiscard]] GaugeField effective_gauge(const NCParameters& params, const PhysicalConstants& constants,
                                         double mass);

} // namespace ncring
