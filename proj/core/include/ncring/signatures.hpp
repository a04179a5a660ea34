#pragma once

#include "ncring/ring.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ncring {

/// lambda = d/df (J/f) and sigma = d/df ((J - N J0)/f), flux in phi0 units
/// (A per phi0^2). Multiply by si_signature_factor() for A/Wb^2.
struct SignaturePoint {
    double f = 0.0;
    double lambda = 0.0;
    double sigma = 0.0;
};

using SignatureSeries = std::vector<SignaturePoint>;

[[nodiscard]] double si_signature_factor(const PhysicalConstants& c = codata2018) noexcept;

enum class Parity { odd, even, unknown };

enum class CriterionBranch { criterion_1, criterion_2, null_odd, null_even, inconclusive };

[[nodiscard]] std::string_view to_string(Parity p) noexcept;
[[nodiscard]] std::string_view to_string(CriterionBranch b) noexcept;

struct CriterionVerdict {
    bool nc_detected = false;
    Parity parity = Parity::unknown;
    CriterionBranch branch = CriterionBranch::inconclusive;
};

/// Result of a log-log least-squares fit value ~ amplitude * f^exponent.
struct FitResult {
    double amplitude = 0.0;  // signed
    double exponent = 0.0;
    double r_squared = 0.0;
    int n_points_used = 0;
    /// One-sigma uncertainty of the amplitude propagated from measurement
    /// noise; 0 when the series carries no noise model.
    double amplitude_stderr = 0.0;
};

/// Decision thresholds shared by the analytic classifier and the data pipeline.
struct Thresholds {
    double exponent_target = -2.0;
    double exponent_tolerance = 0.2;
    double r_squared_min = 0.99;
    /// "Zero" amplitude cut, in units of N J0.
    double amplitude_floor = 1e-6;
    /// An amplitude is also "zero" when below this many standard errors.
    double significance_z = 3.0;
    /// Null branches require the surviving signature to match N J0 this closely.
    double amplitude_match_tolerance = 0.05;
    /// Largest effective flux a divergence pattern may imply; guards against a
    /// wrong parity hypothesis masquerading as an NC signal.
    double max_f_nc = 0.25;
};

[[nodiscard]] double lambda_closed(const RingConfig& config, double f);
[[nodiscard]] double sigma_closed(const RingConfig& config, double f);

/// Pointwise closed-form signatures on a strictly increasing positive grid.
[[nodiscard]] SignatureSeries signature_sweep(const RingConfig& config, std::span<const double> f_grid);

/// Ordinary least squares of log10|value| on log10 f. Points with |value|
/// below 1e-3 of the median magnitude are dropped; when more than 5% of the
/// remaining points disagree with the majority sign, r_squared is forced to 0
/// and a note is appended.
[[nodiscard]] FitResult fit_power_law(std::span<const double> f, std::span<const double> values,
                                      std::vector<std::string>* notes = nullptr);

/// Verdict plus the fits it was derived from. Series that are identically
/// zero have no fit.
struct Classification {
    CriterionVerdict verdict;
    std::optional<FitResult> lambda_fit;
    std::optional<FitResult> sigma_fit;
    std::vector<std::string> notes;
};

/// Applies the criterion to already-computed fits. Absent fits count as zero
/// amplitude. `lambda_below_sigma` is the pointwise ordering test.
[[nodiscard]] Classification classify_fits(std::optional<FitResult> lambda_fit,
                                           std::optional<FitResult> sigma_fit, bool lambda_below_sigma,
                                           long long n_electrons, double j0, const Thresholds& thresholds);

/// Samples of one signature on a flux grid.
struct SampledCurve {
    std::vector<double> f;
    std::vector<double> value;
};

/// Throws InvalidInput when the two curves are not sampled on the same grid.
[[nodiscard]] Classification classify_analytic(const SampledCurve& lambda_series,
                                               const SampledCurve& sigma_series, long long n_electrons,
                                               double j0, const Thresholds& thresholds = {});

/// Convenience overload for a single series carrying both signatures.
[[nodiscard]] Classification classify_analytic(const SignatureSeries& series, long long n_electrons,
                                               double j0, const Thresholds& thresholds = {});

} // namespace ncring
