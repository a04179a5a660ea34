#pragma once

#include "ncring/experiment.hpp"
#include "ncring/signatures.hpp"
#include "ncring/spline.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ncring {

struct Smoothing {
    enum class Kind { none, spline };
    Kind kind = Kind::none;
    /// Roughness penalty for Kind::spline; chosen by GCV when empty.
    std::optional<double> penalty;

    [[nodiscard]] static Smoothing interpolate() { return {}; }
    [[nodiscard]] static Smoothing gcv() { return {Kind::spline, std::nullopt}; }
};

/// Differentiable current curve J(f) over [f_min, f_max].
class SmoothedCurve {
public:
    SmoothedCurve(CubicSpline spline, std::vector<double> weights, double penalty, Smoothing::Kind kind);

    [[nodiscard]] double value(double f) const { return spline_.value(f); }
    [[nodiscard]] double derivative(double f) const { return spline_.derivative(f); }
    [[nodiscard]] double domain_min() const noexcept { return spline_.domain_min(); }
    [[nodiscard]] double domain_max() const noexcept { return spline_.domain_max(); }

    [[nodiscard]] const CubicSpline& spline() const noexcept { return spline_; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
    [[nodiscard]] double penalty() const noexcept { return penalty_; }
    [[nodiscard]] Smoothing::Kind kind() const noexcept { return kind_; }

private:
    CubicSpline spline_;
    std::vector<double> weights_;
    double penalty_;
    Smoothing::Kind kind_;
};

/// Interpolating or smoothing spline through the measured currents. Spline
/// weights are 1/sd_i^2 from the series' noise model (uniform when noiseless).
[[nodiscard]] SmoothedCurve smooth_current(const MeasurementSeries& series, const Smoothing& smoothing);

/// lambda^ = J'/f - J/f^2 and sigma^ = lambda^ + N J0 / f^2, both from the
/// analytic derivative of the curve, on the series' grid points with f >= f_floor.
/// Throws PipelineOrderError when n_electrons is empty.
[[nodiscard]] SignatureSeries estimate_signatures(const SmoothedCurve& curve, std::span<const double> grid,
                                                  std::optional<long long> n_electrons, double j0);

[[nodiscard]] SignatureSeries estimate_signatures(const MeasurementSeries& series,
                                                  std::optional<long long> n_electrons, double j0,
                                                  const Smoothing& smoothing, double f_floor = 0.01);

/// Electron-number hypotheses. The current's flux slope is -2 N J0 for both
/// parities, so N is read from the mean slope of the curve; `odd` and `even`
/// are the nearest integers of each parity.
struct NEstimate {
    double continuous = 0.0;
    long long odd = 1;
    long long even = 2;
};

/// Throws EstimationFailed when the slope does not describe a positive N.
[[nodiscard]] NEstimate estimate_n(const SmoothedCurve& curve, std::span<const double> grid, double j0);

/// Parameters the analyst knows beyond the measurement file.
struct KnownParameters {
    std::optional<long long> n_electrons;
    std::optional<double> radius_m;
    double alpha = 1.0;
    double mass = codata2018.m_e;
    PhysicalConstants constants = codata2018;
};

struct DetectionThresholds {
    Thresholds criterion{};
    double r_squared_clean = 0.99;
    double r_squared_noisy = 0.9;
    double f_floor = 0.01;
    /// Overrides the default (interpolate when noiseless, GCV spline otherwise).
    std::optional<Smoothing> smoothing;
};

struct DetectionReport {
    CriterionVerdict verdict;
    std::optional<FitResult> lambda_fit;
    std::optional<FitResult> sigma_fit;
    double f_nc_hat = 0.0;
    std::optional<double> theta_tilde_hat;
    long long n_hat = 0;
    std::string n_source; // "given", "metadata" or "estimated"
    double j0 = 0.0;
    double max_identity_residual = 0.0; // max |sigma^ - lambda^ - N J0/f^2| / (N J0/f^2)
    std::vector<std::string> notes;
    SignatureSeries signatures;
};

[[nodiscard]] DetectionReport detect(const MeasurementSeries& series, const KnownParameters& known,
                                     const DetectionThresholds& thresholds = {});

} // namespace ncring
