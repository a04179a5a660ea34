#include "ncring/phasespace.hpp"

#include "ncring/errors.hpp"

#include <cmath>
#include <string>

namespace ncring {

void NCParameters::validate() const
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InvalidParameter("alpha must lie in (0, 1], got " + std::to_string(alpha));
    if (!std::isfinite(theta) || !std::isfinite(theta_tilde))
        throw InvalidParameter("theta and theta_tilde must be finite");
    if (theta_tilde < 0.0)
        throw InvalidParameter("theta_tilde must be non-negative");
    if (alpha == 1.0 && theta * theta_tilde != 0.0)
        throw InvalidParameter("alpha = 1 requires theta * theta_tilde = 0");
}

MappedOperators sw_map(const NCParameters& params, const PhysicalConstants& constants)
{
    const double alpha = params.alpha;
    if (!(alpha > 0.0))
        throw InvalidParameter("sw_map: alpha must be positive");

    const double scale = 2.0 * alpha * constants.hbar;
    const double t = params.theta / scale;
    const double tt = params.theta_tilde / scale;

    MappedOperators ops;
    ops.x = {alpha, 0.0, 0.0, -t};
    ops.y = {0.0, alpha, t, 0.0};
    ops.px = {0.0, tt, alpha, 0.0};
    ops.py = {-tt, 0.0, 0.0, alpha};
    return ops;
}

double commutator(const LinearPhaseForm& u, const LinearPhaseForm& v,
                  const PhysicalConstants& constants) noexcept
{
    // Grouped so that swapping u and v swaps the two sums: exact antisymmetry.
    const double forward = u.c_x * v.c_px + u.c_y * v.c_py;
    const double backward = u.c_px * v.c_x + u.c_py * v.c_y;
    return constants.hbar * (forward - backward);
}

AlgebraReport verify_algebra(const NCParameters& params, const PhysicalConstants& constants)
{
    const auto ops = sw_map(params, constants);

    AlgebraReport report;
    report.comm_xy = commutator(ops.x, ops.y, constants);
    report.comm_pxpy = commutator(ops.px, ops.py, constants);
    report.comm_xpx = commutator(ops.x, ops.px, constants);
    report.comm_xpy = commutator(ops.x, ops.py, constants);
    report.heisenberg_residual = std::abs(report.comm_xpx - constants.hbar) / constants.hbar;
    return report;
}

double theta_from_constraint(double alpha, double theta_tilde, const PhysicalConstants& constants,
                             ConstraintVariant variant)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InvalidParameter("theta_from_constraint: alpha must lie in (0, 1]");
    if (alpha == 1.0)
        return 0.0;
    if (theta_tilde == 0.0)
        throw ConstraintUnsatisfiable("alpha != 1 requires a nonzero theta_tilde");

    const double factor = variant == ConstraintVariant::standard ? 2.0 : 4.0;
    const double hbar = constants.hbar;
    return factor * hbar * hbar * alpha * alpha * (1.0 - alpha * alpha) / theta_tilde;
}

GaugeField effective_gauge(const NCParameters& params, const PhysicalConstants& constants, double mass)
{
    if (!(params.alpha > 0.0))
        throw InvalidParameter("effective_gauge: alpha must be positive");
    if (!(mass > 0.0))
        throw InvalidParameter("effective_gauge: mass must be positive");

    const double denom = constants.e * params.alpha * params.alpha * constants.hbar;
    GaugeField g;
    g.b_z = params.theta_tilde / denom;
    g.a_coeff = params.theta_tilde / (2.0 * denom);
    g.m_star = mass / params.alpha;
    return g;
}

} // namespace ncring
