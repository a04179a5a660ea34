#pragma once

#include <optional>
#include <span>
#include <vector>

namespace ncring {

/// Natural cubic spline stored as knot values and knot second derivatives.
class CubicSpline {
public:
    CubicSpline(std::vector<double> knots, std::vector<double> values, std::vector<double> second_derivatives);

    [[nodiscard]] double value(double t) const;
    [[nodiscard]] double derivative(double t) const;

    [[nodiscard]] double domain_min() const noexcept { return knots_.front(); }
    [[nodiscard]] double domain_max() const noexcept { return knots_.back(); }
    [[nodiscard]] const std::vector<double>& knots() const noexcept { return knots_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

private:
    [[nodiscard]] std::size_t interval(double t) const;

    std::vector<double> knots_;
    std::vector<double> values_;
    std::vector<double> m_;
};

/// Weighted cubic smoothing spline (Reinsch form): minimises
///   sum_i w_i (y_i - g(x_i))^2 + penalty * integral g''(t)^2 dt.
/// penalty = 0 gives the natural interpolating spline. The banded system is
/// factorised once per (knots, weights, penalty) so repeated fits are O(n).
class SplineSmoother {
public:
    SplineSmoother(std::span<const double> knots, std::span<const double> weights, double penalty);

    [[nodiscard]] CubicSpline fit(std::span<const double> y) const;

    /// tr(I - A), the residual degrees of freedom of the linear smoother A.
    [[nodiscard]] double residual_dof() const;

    [[nodiscard]] double penalty() const noexcept { return penalty_; }

private:
    std::vector<double> x_;
    std::vector<double> w_;
    std::vector<double> h_;
    double penalty_;
    // LDL^T of the pentadiagonal interior system.
    std::vector<double> d_;
    std::vector<double> l1_;
    std::vector<double> l2_;
};

/// Natural cubic interpolating spline. Throws InvalidInput on fewer than 3
/// knots or non-increasing knots.
[[nodiscard]] CubicSpline interpolating_spline(std::span<const double> x, std::span<const double> y);

struct SmoothingFit {
    CubicSpline spline;
    double penalty = 0.0;
    double gcv_score = 0.0;
    double effective_dof = 0.0; // tr(A)
};

/// Smoothing spline; when `penalty` is empty it is chosen by minimising the
/// generalised cross-validation score over a log grid with golden-section
/// refinement.
[[nodiscard]] SmoothingFit smoothing_spline(std::span<const double> x, std::span<const double> y,
                                            std::span<const double> weights,
                                            std::optional<double> penalty = std::nullopt);

} // namespace ncring
