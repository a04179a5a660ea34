#include "ncring/analysis.hpp"

#include "ncring/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace ncring {

SmoothedCurve::SmoothedCurve(CubicSpline spline, std::vector<double> weights, double penalty, Smoothing::Kind kind)
    : spline_(std::move(spline)), weights_(std::move(weights)), penalty_(penalty), kind_(kind)
{
}

namespace {

std::vector<double> flux_of(const MeasurementSeries& s)
{
    std::vector<double> f;
    f.reserve(s.points.size());
    for (const auto& p : s.points)
        f.push_back(p.f);
    return f;
}

std::vector<double> current_of(const MeasurementSeries& s)
{
    std::vector<double> j;
    j.reserve(s.points.size());
    for (const auto& p : s.points)
        j.push_back(p.current);
    return j;
}

// 1/sd^2 normalised to unit mean; uniform for noiseless series.
std::vector<double> noise_weights(const MeasurementSeries& s)
{
    std::vector<double> w(s.points.size(), 1.0);
    if (s.meta.noise.noiseless())
        return w;
    double mean = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double sd = s.meta.noise.sd(s.points[i].current);
        w[i] = sd > 0.0 ? 1.0 / (sd * sd) : 0.0;
        mean += w[i];
    }
    mean /= static_cast<double>(w.size());
    const double largest = *std::max_element(w.begin(), w.end());
    for (auto& x : w)
        x = x > 0.0 ? x / mean : largest / mean;
    return w;
}

std::vector<double> analysis_grid(const MeasurementSeries& s, double f_floor)
{
    std::vector<double> grid;
    for (const auto& p : s.points)
        if (p.f >= f_floor)
            grid.push_back(p.f);
    return grid;
}

} // namespace

SmoothedCurve smooth_current(const MeasurementSeries& series, const Smoothing& smoothing)
{
    series.validate();
    const auto f = flux_of(series);
    const auto j = current_of(series);
    auto w = noise_weights(series);

    if (smoothing.kind == Smoothing::Kind::none) {
        auto spline = SplineSmoother(f, w, 0.0).fit(j);
        return SmoothedCurve(std::move(spline), std::move(w), 0.0, Smoothing::Kind::none);
    }
    auto fit = smoothing_spline(f, j, w, smoothing.penalty);
    return SmoothedCurve(std::move(fit.spline), std::move(w), fit.penalty, Smoothing::Kind::spline);
}

SignatureSeries estimate_signatures(const SmoothedCurve& curve, std::span<const double> grid,
                                    std::optional<long long> n_electrons, double j0)
{
    if (!n_electrons)
        throw PipelineOrderError("estimate_signatures: electron number is neither known nor estimated");
    const double nj0 = static_cast<double>(*n_electrons) * j0;

    SignatureSeries out;
    out.reserve(grid.size());
    for (double f : grid) {
        if (!(f > 0.0))
            throw DomainError("signatures are undefined for f <= 0");
        const double lambda = curve.derivative(f) / f - curve.value(f) / (f * f);
        out.push_back({f, lambda, lambda + nj0 / (f * f)});
    }
    return out;
}

SignatureSeries estimate_signatures(const MeasurementSeries& series, std::optional<long long> n_electrons, double j0,
                                    const Smoothing& smoothing, double f_floor)
{
    const auto curve = smooth_current(series, smoothing);
    const auto grid = analysis_grid(series, f_floor);
    return estimate_signatures(curve, grid, n_electrons, j0);
}

NEstimate estimate_n(const SmoothedCurve& curve, std::span<const double> grid, double j0)
{
    if (grid.empty() || !(j0 > 0.0))
        throw EstimationFailed("estimate_n: empty grid or non-positive current unit");
    double slope = 0.0;
    for (double f : grid)
        slope += curve.derivative(f);
    slope /= static_cast<double>(grid.size());

    NEstimate est;
    est.continuous = -slope / (2.0 * j0);
    if (!std::isfinite(est.continuous) || est.continuous < 0.5)
        throw EstimationFailed(fmt::format("estimate_n: current slope implies N = {:.6g}", est.continuous));

    const double rounded = std::round(est.continuous);
    const auto nearest = static_cast<long long>(rounded);
    if (nearest % 2 != 0) {
        est.odd = nearest;
        est.even = est.continuous >= rounded ? nearest + 1 : nearest - 1;
    } else {
        est.even = nearest;
        est.odd = est.continuous >= rounded ? nearest + 1 : nearest - 1;
    }
    if (est.even < 2)
        est.even = 2;
    return est;
}

namespace {

struct Hypothesis {
    long long n = 0;
    SignatureSeries signatures;
    Classification result;
};

double mean_lambda_f2(const SmoothedCurve& curve, std::span<const double> grid)
{
    double s = 0.0;
    for (double f : grid)
        s += curve.derivative(f) * f - curve.value(f);
    return s / static_cast<double>(grid.size());
}

// The smoother is linear in the data, so the grid-mean of lambda^ f^2 is a
// linear functional of the currents; its variance follows from the noise sd's.
double lambda_amplitude_stderr(const MeasurementSeries& series, const SmoothedCurve& curve,
                               std::span<const double> grid)
{
    if (series.meta.noise.noiseless())
        return 0.0;
    const auto f = flux_of(series);
    const SplineSmoother smoother(f, curve.weights(), curve.penalty());
    std::vector<double> unit(f.size(), 0.0);
    double var = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        unit[i] = 1.0;
        const SmoothedCurve basis(smoother.fit(unit), curve.weights(), curve.penalty(), curve.kind());
        unit[i] = 0.0;
        const double coeff = mean_lambda_f2(basis, grid);
        const double sd = series.meta.noise.sd(series.points[i].current);
        var += coeff * coeff * sd * sd;
    }
    return std::sqrt(var);
}

std::optional<FitResult> fit_or_zero(std::span<const double> f, std::span<const double> v, const char* name,
                                     double stderr_amp, std::vector<std::string>& notes)
{
    try {
        auto fit = fit_power_law(f, v, &notes);
        fit.amplitude_stderr = stderr_amp;
        return fit;
    } catch (const InsufficientData& e) {
        notes.push_back(std::string(name) + ": " + e.what() + "; treated as zero");
        return std::nullopt;
    }
}

Hypothesis evaluate_hypothesis(const SmoothedCurve& curve, std::span<const double> grid, long long n, double j0,
                               double stderr_amp, const Thresholds& thresholds)
{
    Hypothesis h;
    h.n = n;
    h.signatures = estimate_signatures(curve, grid, n, j0);

    std::vector<double> lam;
    std::vector<double> sig;
    bool below = true;
    for (const auto& p : h.signatures) {
        lam.push_back(p.lambda);
        sig.push_back(p.sigma);
        below = below && p.lambda < p.sigma;
    }
    std::vector<std::string> notes;
    auto lf = fit_or_zero(grid, lam, "lambda", stderr_amp, notes);
    auto sf = fit_or_zero(grid, sig, "sigma", stderr_amp, notes);
    h.result = classify_fits(lf, sf, below, n, j0, thresholds);
    notes.insert(notes.end(), h.result.notes.begin(), h.result.notes.end());
    h.result.notes = std::move(notes);
    return h;
}

bool self_consistent(const Hypothesis& h)
{
    const auto parity = h.n % 2 != 0 ? Parity::odd : Parity::even;
    return h.result.verdict.branch != CriterionBranch::inconclusive && h.result.verdict.parity == parity;
}

} // namespace

DetectionReport detect(const MeasurementSeries& series, const KnownParameters& known,
                       const DetectionThresholds& thresholds)
{
    series.validate();
    DetectionReport report;

    const auto radius = known.radius_m ? known.radius_m : series.meta.radius_m;
    if (!radius || !(*radius > 0.0))
        throw InvalidInput("ring radius unknown: supply it explicitly or via radius_m metadata");
    if (!(known.alpha > 0.0 && known.alpha <= 1.0))
        throw InvalidParameter("alpha must lie in (0, 1]");

    RingConfig ring;
    ring.radius = *radius;
    ring.mass = known.mass;
    ring.nc.alpha = known.alpha;
    ring.constants = known.constants;
    const double j0 = current_unit(ring);
    report.j0 = j0;

    const bool noisy = !series.meta.noise.noiseless();
    const Smoothing smoothing = thresholds.smoothing.value_or(noisy ? Smoothing::gcv() : Smoothing::interpolate());
    Thresholds criterion = thresholds.criterion;
    criterion.r_squared_min = noisy ? thresholds.r_squared_noisy : thresholds.r_squared_clean;

    const auto curve = smooth_current(series, smoothing);
    if (curve.kind() == Smoothing::Kind::spline)
        report.notes.push_back(fmt::format("smoothing spline penalty {:.6g}", curve.penalty()));

    const auto grid = analysis_grid(series, thresholds.f_floor);
    if (grid.size() < 4)
        throw InsufficientData(fmt::format("fewer than 4 samples with f >= f_floor = {}", thresholds.f_floor));

    const double stderr_amp = lambda_amplitude_stderr(series, curve, grid);
    if (noisy)
        report.notes.push_back(fmt::format("amplitude standard error {:.6g} A", stderr_amp));

    std::vector<Hypothesis> hypotheses;
    if (known.n_electrons || series.meta.n_electrons) {
        report.n_source = known.n_electrons ? "given" : "metadata";
        const long long n = known.n_electrons ? *known.n_electrons : *series.meta.n_electrons;
        if (n < 1)
            throw InvalidParameter("n_electrons must be at least 1");
        hypotheses.push_back(evaluate_hypothesis(curve, grid, n, j0, stderr_amp, criterion));
    } else {
        report.n_source = "estimated";
        const auto est = estimate_n(curve, grid, j0);
        report.notes.push_back(fmt::format("slope estimate N = {:.6f} (odd {} / even {})", est.continuous, est.odd,
                                           est.even));
        hypotheses.push_back(evaluate_hypothesis(curve, grid, est.odd, j0, stderr_amp, criterion));
        hypotheses.push_back(evaluate_hypothesis(curve, grid, est.even, j0, stderr_amp, criterion));
    }

    const Hypothesis* chosen = &hypotheses.front();
    bool tie = false;
    if (hypotheses.size() == 2) {
        const bool odd_ok = self_consistent(hypotheses[0]);
        const bool even_ok = self_consistent(hypotheses[1]);
        if (odd_ok != even_ok) {
            chosen = odd_ok ? &hypotheses[0] : &hypotheses[1];
        } else {
            tie = true;
            report.notes.push_back(odd_ok ? "both parity hypotheses are self-consistent"
                                          : "neither parity hypothesis is self-consistent");
        }
    }

    report.n_hat = chosen->n;
    report.signatures = chosen->signatures;
    report.lambda_fit = chosen->result.lambda_fit;
    report.sigma_fit = chosen->result.sigma_fit;
    report.verdict = tie ? CriterionVerdict{} : chosen->result.verdict;
    for (const auto& h : hypotheses)
        for (const auto& note : h.result.notes)
            report.notes.push_back(hypotheses.size() > 1 ? fmt::format("N={}: {}", h.n, note) : note);

    const double nj0 = static_cast<double>(report.n_hat) * j0;
    for (const auto& p : report.signatures) {
        const double expected = nj0 / (p.f * p.f);
        report.max_identity_residual =
            std::max(report.max_identity_residual, std::abs((p.sigma - p.lambda) - expected) / expected);
    }

    if (report.verdict.branch == CriterionBranch::criterion_1)
        report.f_nc_hat = -report.lambda_fit->amplitude / (2.0 * nj0);
    else if (report.verdict.branch == CriterionBranch::criterion_2)
        report.f_nc_hat = -report.sigma_fit->amplitude / (2.0 * nj0);
    if (report.f_nc_hat < 0.0) {
        report.notes.push_back("negative effective flux estimate clamped to 0");
        report.f_nc_hat = 0.0;
    }

    const double hbar = known.constants.hbar;
    report.theta_tilde_hat = report.f_nc_hat * hbar * hbar * known.alpha * known.alpha / (*radius * *radius);
    if (report.verdict.branch == CriterionBranch::inconclusive)
        report.notes.push_back("verdict inconclusive: no criterion branch matched");
    return report;
}

} // namespace ncring
