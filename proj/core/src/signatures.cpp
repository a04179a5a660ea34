#include "ncring/signatures.hpp"

#include "ncring/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ncring {

double si_signature_factor(const PhysicalConstants& c) noexcept
{
    const double phi0 = c.phi0();
    return 1.0 / (phi0 * phi0);
}

std::string_view to_string(Parity p) noexcept
{
    switch (p) {
    case Parity::odd: return "odd";
    case Parity::even: return "even";
    case Parity::unknown: return "unknown";
    }
    return "unknown";
}

std::string_view to_string(CriterionBranch b) noexcept
{
    switch (b) {
    case CriterionBranch::criterion_1: return "criterion-1";
    case CriterionBranch::criterion_2: return "criterion-2";
    case CriterionBranch::null_odd: return "null-odd";
    case CriterionBranch::null_even: return "null-even";
    case CriterionBranch::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

double lambda_closed(const RingConfig& config, double f)
{
    if (!(f > 0.0))
        throw DomainError("lambda is undefined for f <= 0");
    const double nj0 = static_cast<double>(config.n_electrons) * current_unit(config);
    const double fnc = f_nc(config);
    if (config.odd())
        return -2.0 * nj0 * fnc / (f * f);
    return -nj0 * (1.0 + 2.0 * fnc) / (f * f);
}

double sigma_closed(const RingConfig& config, double f)
{
    if (!(f > 0.0))
        throw DomainError("sigma is undefined for f <= 0");
    const double nj0 = static_cast<double>(config.n_electrons) * current_unit(config);
    const double fnc = f_nc(config);
    if (config.odd())
        return nj0 * (1.0 - 2.0 * fnc) / (f * f);
    return -2.0 * nj0 * fnc / (f * f);
}

SignatureSeries signature_sweep(const RingConfig& config, std::span<const double> f_grid)
{
    SignatureSeries out;
    out.reserve(f_grid.size());
    for (std::size_t i = 0; i < f_grid.size(); ++i) {
        if (i > 0 && !(f_grid[i] > f_grid[i - 1]))
            throw InvalidGrid("signature_sweep: grid must be strictly increasing");
        const double f = f_grid[i];
        out.push_back({f, lambda_closed(config, f), sigma_closed(config, f)});
    }
    return out;
}

namespace {

bool matches_power(const FitResult& fit, const Thresholds& t)
{
    return std::abs(fit.exponent - t.exponent_target) <= t.exponent_tolerance && fit.r_squared >= t.r_squared_min;
}

} // namespace

Classification classify_fits(std::optional<FitResult> lambda_fit, std::optional<FitResult> sigma_fit,
                             bool lambda_below_sigma, long long n_electrons, double j0,
                             const Thresholds& thresholds)
{
    Classification out;
    out.lambda_fit = lambda_fit;
    out.sigma_fit = sigma_fit;

    const double nj0 = static_cast<double>(n_electrons) * j0;
    const auto is_zero = [&](const std::optional<FitResult>& fit) {
        if (!fit)
            return true;
        const double cut = std::max(thresholds.amplitude_floor * nj0, thresholds.significance_z * fit->amplitude_stderr);
        return std::abs(fit->amplitude) < cut;
    };
    const auto divergent = [&](const std::optional<FitResult>& fit, double sign) {
        return !is_zero(fit) && matches_power(*fit, thresholds) && sign * fit->amplitude > 0.0;
    };
    const auto matches_amplitude = [&](const std::optional<FitResult>& fit, double target) {
        return fit && matches_power(*fit, thresholds) &&
               std::abs(fit->amplitude - target) <= thresholds.amplitude_match_tolerance * std::abs(target);
    };
    const auto implied_fnc_ok = [&](double amplitude) {
        return -amplitude / (2.0 * nj0) <= thresholds.max_f_nc;
    };

    auto& v = out.verdict;
    if (divergent(lambda_fit, -1.0) && divergent(sigma_fit, +1.0)) {
        if (implied_fnc_ok(lambda_fit->amplitude)) {
            v = {true, Parity::odd, CriterionBranch::criterion_1};
            return out;
        }
        out.notes.emplace_back("odd pattern rejected: implied f_nc exceeds max_f_nc");
    }
    if (divergent(lambda_fit, -1.0) && divergent(sigma_fit, -1.0)) {
        if (!lambda_below_sigma) {
            out.notes.emplace_back("even pattern rejected: lambda < sigma does not hold pointwise");
        } else if (implied_fnc_ok(sigma_fit->amplitude)) {
            v = {true, Parity::even, CriterionBranch::criterion_2};
            return out;
        } else {
            out.notes.emplace_back("even pattern rejected: implied f_nc exceeds max_f_nc");
        }
    }
    if (is_zero(lambda_fit) && matches_amplitude(sigma_fit, nj0)) {
        v = {false, Parity::odd, CriterionBranch::null_odd};
        return out;
    }
    if (is_zero(sigma_fit) && matches_amplitude(lambda_fit, -nj0)) {
        v = {false, Parity::even, CriterionBranch::null_even};
        return out;
    }
    v = {false, Parity::unknown, CriterionBranch::inconclusive};
    return out;
}

namespace {

std::optional<FitResult> try_fit(std::span<const double> f, std::span<const double> values, const char* name,
                                 std::vector<std::string>& notes)
{
    try {
        return fit_power_law(f, values, &notes);
    } catch (const InsufficientData&) {
        notes.push_back(std::string(name) + ": no admissible nonzero samples, treated as zero");
        return std::nullopt;
    }
}

} // namespace

Classification classify_analytic(const SampledCurve& lambda_series, const SampledCurve& sigma_series,
                                 long long n_electrons, double j0, const Thresholds& thresholds)
{
    if (lambda_series.f != sigma_series.f)
        throw InvalidInput("classify_analytic: lambda and sigma must share one flux grid");
    if (lambda_series.value.size() != lambda_series.f.size() || sigma_series.value.size() != sigma_series.f.size())
        throw InvalidInput("classify_analytic: value and grid lengths differ");
    if (std::any_of(lambda_series.f.begin(), lambda_series.f.end(), [](double f) { return !(f > 0.0); }))
        throw InvalidInput("classify_analytic: grid must be positive");

    std::vector<std::string> notes;
    auto lam = try_fit(lambda_series.f, lambda_series.value, "lambda", notes);
    auto sig = try_fit(sigma_series.f, sigma_series.value, "sigma", notes);

    bool below = true;
    for (std::size_t i = 0; i < lambda_series.value.size(); ++i)
        below = below && lambda_series.value[i] < sigma_series.value[i];

    auto out = classify_fits(lam, sig, below, n_electrons, j0, thresholds);
    notes.insert(notes.end(), out.notes.begin(), out.notes.end());
    out.notes = std::move(notes);
    return out;
}

Classification classify_analytic(const SignatureSeries& series, long long n_electrons, double j0,
                                 const Thresholds& thresholds)
{
    SampledCurve lam;
    SampledCurve sig;
    for (const auto& p : series) {
        lam.f.push_back(p.f);
        lam.value.push_back(p.lambda);
        sig.f.push_back(p.f);
        sig.value.push_back(p.sigma);
    }
    sig.f = lam.f;
    return classify_analytic(lam, sig, n_electrons, j0, thresholds);
}

} // namespace ncring
