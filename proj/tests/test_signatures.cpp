#include "ncring/errors.hpp"
#include "ncring/experiment.hpp"
#include "ncring/signatures.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace ncring;
using ncring::test::reference_ring;
using ncring::test::rel_diff;
using ncring::test::ring_with_fnc;

namespace {

SampledCurve lambda_of(const SignatureSeries& s)
{
    SampledCurve c;
    for (const auto& p : s) {
        c.f.push_back(p.f);
        c.value.push_back(p.lambda);
    }
    return c;
}

SampledCurve sigma_of(const SignatureSeries& s)
{
    SampledCurve c;
    for (const auto& p : s) {
        c.f.push_back(p.f);
        c.value.push_back(p.sigma);
    }
    return c;
}

} // namespace

TEST(SignatureClosed, Examples)
{
    const auto odd0 = ring_with_fnc(101, 0.0);
    const auto even0 = ring_with_fnc(100, 0.0);
    for (double f : {0.01, 0.3, 1.0}) {
        EXPECT_EQ(lambda_closed(odd0, f), 0.0);
        EXPECT_EQ(sigma_closed(even0, f), 0.0);
    }
    EXPECT_DOUBLE_EQ(lambda_closed(even0, 1.0), -100 * current_unit(even0));
    EXPECT_DOUBLE_EQ(sigma_closed(odd0, 1.0), 101 * current_unit(odd0));

    const auto odd = reference_ring(100001);
    EXPECT_LE(rel_diff(lambda_closed(odd, 0.1), -4.671779960239626e-10), 1e-12);
    EXPECT_NEAR(lambda_closed(odd, 0.1), -4.65e-10, 0.05e-10);

    // Even sigma and odd lambda share the expression -2 N J0 f_nc / f^2.
    const auto even = reference_ring(100000);
    const double nj0 = 100000 * current_unit(even);
    for (double f : {0.02, 0.2})
        EXPECT_DOUBLE_EQ(sigma_closed(even, f), -2.0 * nj0 * f_nc(even) / (f * f));
}

TEST(SignatureClosed, DomainErrors)
{
    const auto r = reference_ring(3);
    EXPECT_THROW((void)lambda_closed(r, 0.0), DomainError);
    EXPECT_THROW((void)sigma_closed(r, -0.1), DomainError);
}

TEST(SignatureClosed, SiFactor)
{
    const double phi0 = codata2018.phi0();
    EXPECT_DOUBLE_EQ(si_signature_factor(), 1.0 / (phi0 * phi0));
}

TEST(SignatureSweep, InverseSquareRatios)
{
    const auto r = reference_ring(10001);
    const std::vector<double> grid{0.1, 0.2, 0.4};
    const auto s = signature_sweep(r, grid);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_LE(rel_diff(s[1].lambda, s[0].lambda / 4.0), 1e-15);
    EXPECT_LE(rel_diff(s[2].lambda, s[0].lambda / 16.0), 1e-15);
    EXPECT_LE(rel_diff(s[2].sigma, s[0].sigma / 16.0), 1e-15);
}

TEST(SignatureSweep, OddLambdaEqualsEvenSigmaAtSameN)
{
    // Parity is a property of N, so compare the closed-form expressions directly.
    const auto odd = reference_ring(10001);
    const auto even = reference_ring(10000);
    const auto grid = make_grid(0.01, 0.5, 16, GridSpacing::log);
    const auto so = signature_sweep(odd, grid);
    const auto se = signature_sweep(even, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        EXPECT_LE(rel_diff(so[i].lambda / 10001.0, se[i].sigma / 10000.0), 1e-14);
}

TEST(SignatureSweep, LogSlopeIsMinusTwo)
{
    const auto grid = make_grid(0.01, 0.5, 64, GridSpacing::log);
    for (long long n : {10000LL, 10001LL, 100000LL, 100001LL}) {
        const auto s = signature_sweep(reference_ring(n), grid);
        const auto lam = lambda_of(s);
        const auto fit = fit_power_law(lam.f, lam.value);
        EXPECT_NEAR(fit.exponent, -2.0, 1e-10);
    }
}

TEST(SignatureSweep, RejectsBadGrid)
{
    const auto r = reference_ring(5);
    const std::vector<double> unordered{0.1, 0.3, 0.2};
    const std::vector<double> with_zero{0.0, 0.1};
    EXPECT_THROW((void)signature_sweep(r, unordered), InvalidGrid);
    EXPECT_THROW((void)signature_sweep(r, with_zero), DomainError);
}

TEST(SignatureSweep, SignPatterns)
{
    const auto grid = make_grid(0.01, 0.5, 40, GridSpacing::log);
    for (double fnc : {1e-6, 1.5828e-5, 1e-3, 0.1, 0.45}) {
        for (const auto& p : signature_sweep(ring_with_fnc(1001, fnc), grid)) {
            EXPECT_LT(p.lambda, 0.0);
            EXPECT_GT(p.sigma, 0.0);
        }
        for (const auto& p : signature_sweep(ring_with_fnc(1000, fnc), grid)) {
            EXPECT_LT(p.lambda, p.sigma);
            EXPECT_LT(p.sigma, 0.0);
        }
    }
}

TEST(SignatureSweep, ScaleCovarianceInN)
{
    const auto grid = make_grid(0.02, 0.5, 10, GridSpacing::linear);
    const auto a = signature_sweep(reference_ring(1001), grid);
    auto cfg = reference_ring(1001);
    cfg.n_electrons = 3003;
    const auto b = signature_sweep(cfg, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_LE(rel_diff(b[i].lambda, 3.0 * a[i].lambda), 1e-14);
        EXPECT_LE(rel_diff(b[i].sigma, 3.0 * a[i].sigma), 1e-14);
    }
}

TEST(SignatureSweep, MatchesFiniteDifferenceOfCurrent)
{
    // f_nc = 1e-2 keeps the odd lambda well above the cancellation floor of
    // a step-1e-7 central difference of J/f.
    const double step = 1e-7;
    for (long long n : {1001LL, 1000LL}) {
        const auto r = ring_with_fnc(n, 1e-2);
        for (double f = 0.05; f <= 0.5 + 1e-12; f += 0.025) {
            const double up = persistent_current(r, f + step) / (f + step);
            const double down = persistent_current(r, f - step) / (f - step);
            const double numeric = (up - down) / (2.0 * step);
            EXPECT_LE(rel_diff(numeric, lambda_closed(r, f)), 1e-5) << "N=" << n << " f=" << f;
        }
    }
}

TEST(FitPowerLaw, ExactLaws)
{
    const auto grid = make_grid(0.01, 0.5, 32, GridSpacing::log);
    std::vector<double> inv_sq;
    std::vector<double> inv;
    for (double f : grid) {
        inv_sq.push_back(-7.0 / (f * f));
        inv.push_back(3.0 / f);
    }
    const auto a = fit_power_law(grid, inv_sq);
    EXPECT_NEAR(a.amplitude, -7.0, 1e-12);
    EXPECT_NEAR(a.exponent, -2.0, 1e-12);
    EXPECT_NEAR(a.r_squared, 1.0, 1e-12);
    EXPECT_EQ(a.n_points_used, 32);
    const auto b = fit_power_law(grid, inv);
    EXPECT_NEAR(b.exponent, -1.0, 1e-12);
    EXPECT_NEAR(b.amplitude, 3.0, 1e-12);
}

TEST(FitPowerLaw, ReferenceOddLambda)
{
    const auto r = reference_ring(100001);
    const auto grid = make_grid(0.01, 0.5, 64, GridSpacing::log);
    const auto lam = lambda_of(signature_sweep(r, grid));
    const auto fit = fit_power_law(lam.f, lam.value);
    EXPECT_NEAR(fit.exponent, -2.0, 1e-6);
    const double expected = -2.0 * 100001 * current_unit(r) * f_nc(r);
    EXPECT_LE(rel_diff(fit.amplitude, expected), 1e-9);
}

TEST(FitPowerLaw, FloorAndInsufficientData)
{
    const std::vector<double> f{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    const std::vector<double> zeros(6, 0.0);
    EXPECT_THROW((void)fit_power_law(f, zeros), InsufficientData);

    // Two samples below 1e-3 of the median are dropped, leaving 4.
    std::vector<double> v;
    for (double x : f)
        v.push_back(1.0 / (x * x));
    v[0] = 1e-9;
    v[5] = 0.0;
    const auto fit = fit_power_law(f, v);
    EXPECT_EQ(fit.n_points_used, 4);
    EXPECT_NEAR(fit.exponent, -2.0, 1e-12);

    v[1] = 0.0;
    EXPECT_THROW((void)fit_power_law(f, v), InsufficientData);

    const std::vector<double> short_f{0.1, 0.2};
    EXPECT_THROW((void)fit_power_law(short_f, f), InvalidInput);
}

TEST(FitPowerLaw, MixedSignsForceZeroRSquared)
{
    const auto grid = make_grid(0.01, 0.5, 40, GridSpacing::log);
    std::vector<double> v;
    for (double f : grid)
        v.push_back(-1.0 / (f * f));
    v[3] = -v[3];
    std::vector<std::string> notes;
    // 1 of 40 is 2.5%, tolerated.
    EXPECT_GT(fit_power_law(grid, v, &notes).r_squared, 0.9);
    EXPECT_TRUE(notes.empty());
    v[7] = -v[7];
    v[11] = -v[11];
    const auto fit = fit_power_law(grid, v, &notes);
    EXPECT_EQ(fit.r_squared, 0.0);
    EXPECT_LT(fit.amplitude, 0.0);
    ASSERT_EQ(notes.size(), 1u);
    EXPECT_NE(notes[0].find("mixed signs"), std::string::npos);
}

TEST(FitPowerLaw, ScaleEquivariance)
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 0.05);
    const auto grid = make_grid(0.01, 0.5, 50, GridSpacing::log);
    std::vector<double> v;
    for (double f : grid)
        v.push_back(2.0 / (f * f) * (1.0 + noise(rng)));
    const auto base = fit_power_law(grid, v);
    for (double c : {1e-20, 0.5, 8.0, 1e12}) {
        std::vector<double> scaled;
        for (double x : v)
            scaled.push_back(c * x);
        const auto fit = fit_power_law(grid, scaled);
        EXPECT_LE(rel_diff(fit.amplitude, c * base.amplitude), 1e-12);
        EXPECT_NEAR(fit.exponent, base.exponent, 1e-12);
        EXPECT_NEAR(fit.r_squared, base.r_squared, 1e-12);
    }
}

TEST(FitPowerLaw, ExponentOnExactSamplesBothParities)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> fnc_dist(1e-6, 0.2);
    std::uniform_int_distribution<long long> n_dist(1, 200000);
    for (int i = 0; i < 100; ++i) {
        const auto r = ring_with_fnc(n_dist(rng), fnc_dist(rng));
        const auto grid = make_grid(0.01, 0.5, 64, GridSpacing::log);
        const auto s = signature_sweep(r, grid);
        const auto lam = lambda_of(s);
        const auto sig = sigma_of(s);
        EXPECT_NEAR(fit_power_law(lam.f, lam.value).exponent, -2.0, 1e-9);
        EXPECT_NEAR(fit_power_law(sig.f, sig.value).exponent, -2.0, 1e-9);
    }
}

TEST(ClassifyAnalytic, Branches)
{
    const auto grid = make_grid(0.01, 0.5, 64, GridSpacing::log);
    struct Case {
        long long n;
        double fnc;
        bool detected;
        Parity parity;
        CriterionBranch branch;
    };
    const Case cases[] = {
        {100001, 1.5828e-5, true, Parity::odd, CriterionBranch::criterion_1},
        {100000, 1.5828e-5, true, Parity::even, CriterionBranch::criterion_2},
        {10001, 1.5828e-5, true, Parity::odd, CriterionBranch::criterion_1},
        {10000, 1.5828e-5, true, Parity::even, CriterionBranch::criterion_2},
        {100001, 0.0, false, Parity::odd, CriterionBranch::null_odd},
        {100000, 0.0, false, Parity::even, CriterionBranch::null_even},
        {3, 0.0, false, Parity::odd, CriterionBranch::null_odd},
    };
    for (const auto& c : cases) {
        const auto r = ring_with_fnc(c.n, c.fnc);
        const auto s = signature_sweep(r, grid);
        const auto cls = classify_analytic(s, c.n, current_unit(r));
        EXPECT_EQ(cls.verdict.nc_detected, c.detected) << c.n << " " << c.fnc;
        EXPECT_EQ(cls.verdict.parity, c.parity) << c.n << " " << c.fnc;
        EXPECT_EQ(cls.verdict.branch, c.branch) << c.n << " " << c.fnc;
        if (c.branch == CriterionBranch::criterion_2)
            for (const auto& p : s)
                EXPECT_LT(p.lambda, p.sigma);
    }
}

TEST(ClassifyAnalytic, VerdictInvariantUnderCommonScaling)
{
    const auto grid = make_grid(0.01, 0.5, 32, GridSpacing::log);
    for (long long n : {1001LL, 1000LL}) {
        const auto r = ring_with_fnc(n, 1e-4);
        const double j0 = current_unit(r);
        const auto s = signature_sweep(r, grid);
        const auto base = classify_analytic(s, n, j0);
        for (double c : {1e-6, 3.0, 1e9}) {
            auto scaled = s;
            for (auto& p : scaled) {
                p.lambda *= c;
                p.sigma *= c;
            }
            const auto cls = classify_analytic(scaled, n, c * j0);
            EXPECT_EQ(cls.verdict.branch, base.verdict.branch);
            EXPECT_EQ(cls.verdict.parity, base.verdict.parity);
        }
    }
}

TEST(ClassifyAnalytic, MismatchedGrids)
{
    SampledCurve a{{0.1, 0.2, 0.3, 0.4}, {1, 2, 3, 4}};
    SampledCurve b{{0.1, 0.2, 0.3, 0.5}, {1, 2, 3, 4}};
    EXPECT_THROW((void)classify_analytic(a, b, 3, 1.0), InvalidInput);
    SampledCurve c{{0.1, 0.2, 0.3, 0.4}, {1, 2, 3}};
    EXPECT_THROW((void)classify_analytic(a, c, 3, 1.0), InvalidInput);
}

TEST(ClassifyFits, RulesAndGuards)
{
    const double nj0 = 1.0;
    const Thresholds t;
    const FitResult neg_small{-1e-3, -2.0, 1.0, 64, 0.0};
    const FitResult pos_full{1.0, -2.0, 1.0, 64, 0.0};
    const FitResult neg_full{-1.0, -2.0, 1.0, 64, 0.0};
    const FitResult neg_tiny{-1e-9, -2.0, 1.0, 64, 0.0};

    EXPECT_EQ(classify_fits(neg_small, pos_full, true, 1, nj0, t).verdict.branch, CriterionBranch::criterion_1);
    EXPECT_EQ(classify_fits(neg_full, neg_small, true, 1, nj0, t).verdict.branch, CriterionBranch::criterion_2);
    EXPECT_EQ(classify_fits(neg_full, neg_small, false, 1, nj0, t).verdict.branch, CriterionBranch::inconclusive);
    EXPECT_EQ(classify_fits(std::nullopt, pos_full, true, 1, nj0, t).verdict.branch, CriterionBranch::null_odd);
    EXPECT_EQ(classify_fits(neg_tiny, pos_full, true, 1, nj0, t).verdict.branch, CriterionBranch::null_odd);
    EXPECT_EQ(classify_fits(neg_full, std::nullopt, true, 1, nj0, t).verdict.branch, CriterionBranch::null_even);

    // Significance: an amplitude inside 3 standard errors counts as zero.
    const FitResult neg_noisy{-1e-3, -2.0, 1.0, 64, 1e-3};
    EXPECT_EQ(classify_fits(neg_noisy, pos_full, true, 1, nj0, t).verdict.branch, CriterionBranch::null_odd);

    // Wrong exponent or poor r^2 defeats a divergence.
    const FitResult neg_wrong_exp{-1e-3, -1.5, 1.0, 64, 0.0};
    const FitResult neg_poor{-1e-3, -2.0, 0.5, 64, 0.0};
    EXPECT_EQ(classify_fits(neg_wrong_exp, pos_full, true, 1, nj0, t).verdict.branch, CriterionBranch::inconclusive);
    EXPECT_EQ(classify_fits(neg_poor, pos_full, true, 1, nj0, t).verdict.branch, CriterionBranch::inconclusive);

    // Implied f_nc beyond max_f_nc rejects the odd pattern with a note.
    const FitResult neg_huge{-0.8, -2.0, 1.0, 64, 0.0};
    const auto guarded = classify_fits(neg_huge, pos_full, true, 1, nj0, t);
    EXPECT_EQ(guarded.verdict.branch, CriterionBranch::inconclusive);
    EXPECT_FALSE(guarded.notes.empty());

    // Null branch requires the surviving amplitude to match N J0.
    const FitResult pos_off{1.2, -2.0, 1.0, 64, 0.0};
    EXPECT_EQ(classify_fits(std::nullopt, pos_off, true, 1, nj0, t).verdict.branch, CriterionBranch::inconclusive);
}

TEST(ClassifyFits, DetectionImpliesNcBranch)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> amp(-2.0, 2.0);
    std::uniform_real_distribution<double> ex(-2.5, -1.5);
    for (int i = 0; i < 2000; ++i) {
        const FitResult a{amp(rng) * std::pow(10.0, -3.0 * (i % 3)), ex(rng), 1.0, 32, 0.0};
        const FitResult b{amp(rng), ex(rng), 1.0, 32, 0.0};
        const auto v = classify_fits(a, b, i % 2 == 0, 1, 1.0, {}).verdict;
        const bool nc_branch = v.branch == CriterionBranch::criterion_1 || v.branch == CriterionBranch::criterion_2;
        EXPECT_EQ(v.nc_detected, nc_branch);
    }
}

TEST(Names, StableStrings)
{
    EXPECT_EQ(to_string(CriterionBranch::criterion_1), "criterion-1");
    EXPECT_EQ(to_string(CriterionBranch::criterion_2), "criterion-2");
    EXPECT_EQ(to_string(CriterionBranch::null_odd), "null-odd");
    EXPECT_EQ(to_string(CriterionBranch::null_even), "null-even");
    EXPECT_EQ(to_string(CriterionBranch::inconclusive), "inconclusive");
    EXPECT_EQ(to_string(Parity::odd), "odd");
    EXPECT_EQ(to_string(Parity::even), "even");
    EXPECT_EQ(to_string(Parity::unknown), "unknown");
}
