#include "ncring/errors.hpp"
#include "ncring/signatures.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ncring {

FitResult fit_power_law(std::span<const double> f, std::span<const double> values, std::vector<std::string>* notes)
{
    if (f.size() != values.size())
        throw InvalidInput("fit_power_law: grid and value lengths differ");

    std::vector<double> magnitudes;
    magnitudes.reserve(values.size());
    for (double v : values)
        magnitudes.push_back(std::abs(v));
    std::vector<double> sorted = magnitudes;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    const double median = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
    const double floor = 1e-3 * median;

    std::vector<double> lx;
    std::vector<double> ly;
    int positive = 0;
    int negative = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double m = magnitudes[i];
        if (!(m > 0.0) || m < floor || !std::isfinite(m) || !(f[i] > 0.0))
            continue;
        lx.push_back(std::log10(f[i]));
        ly.push_back(std::log10(m));
        (values[i] > 0.0 ? positive : negative)++;
    }
    if (lx.size() < 4)
        throw InsufficientData("fit_power_law: fewer than 4 admissible points");

    const double n = static_cast<double>(lx.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double dx = lx[i] - mx;
        const double dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0))
        throw InsufficientData("fit_power_law: admissible points share a single flux value");

    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (intercept + slope * lx[i]);
        ss_res += r * r;
    }

    FitResult fit;
    fit.exponent = slope;
    const double sign = positive >= negative ? 1.0 : -1.0;
    fit.amplitude = sign * std::pow(10.0, intercept);
    fit.n_points_used = static_cast<int>(lx.size());
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : (ss_res == 0.0 ? 1.0 : 0.0);

    const int minority = std::min(positive, negative);
    if (static_cast<double>(minority) > 0.05 * n) {
        fit.r_squared = 0.0;
        if (notes)
            notes->push_back("mixed signs: " + std::to_string(minority) + " of " + std::to_string(lx.size()) +
                             " points disagree with the majority sign");
    }
    return fit;
}

} // namespace ncring
