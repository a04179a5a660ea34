#include "ncring/spline.hpp"

#include "ncring/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncring {

CubicSpline::CubicSpline(std::vector<double> knots, std::vector<double> values, std::vector<double> second_derivatives)
    : knots_(std::move(knots)), values_(std::move(values)), m_(std::move(second_derivatives))
{
    if (knots_.size() < 2 || values_.size() != knots_.size() || m_.size() != knots_.size())
        throw InvalidInput("CubicSpline: inconsistent knot data");
}

std::size_t CubicSpline::interval(double t) const
{
    if (!(t >= knots_.front() && t <= knots_.back()))
        throw DomainError("spline evaluated outside its domain");
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const auto idx = static_cast<std::size_t>(std::distance(knots_.begin(), it));
    return std::min(idx == 0 ? 0 : idx - 1, knots_.size() - 2);
}

double CubicSpline::value(double t) const
{
    const std::size_t i = interval(t);
    const double h = knots_[i + 1] - knots_[i];
    const double a = (knots_[i + 1] - t) / h;
    const double b = (t - knots_[i]) / h;
    return a * values_[i] + b * values_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double t) const
{
    const std::size_t i = interval(t);
    const double h = knots_[i + 1] - knots_[i];
    const double a = (knots_[i + 1] - t) / h;
    const double b = (t - knots_[i]) / h;
    return (values_[i + 1] - values_[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m_[i] +
           (3.0 * b * b - 1.0) / 6.0 * h * m_[i + 1];
}

namespace {

void check_knots(std::span<const double> x)
{
    if (x.size() < 3)
        throw InvalidInput("spline needs at least 3 knots");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw InvalidInput("spline knots must be strictly increasing (duplicate or unordered flux values)");
}

} // namespace

// Interior unknown j (0 <= j < m = n - 2) is the second derivative at knot j+1.
// Column j of Q has entries 1/h_j, -1/h_j - 1/h_{j+1}, 1/h_{j+1} in rows j, j+1, j+2;
// R is tridiagonal with R_jj = (h_j + h_{j+1})/3, R_{j,j+1} = h_{j+1}/6.
SplineSmoother::SplineSmoother(std::span<const double> knots, std::span<const double> weights, double penalty)
    : x_(knots.begin(), knots.end()), w_(weights.begin(), weights.end()), penalty_(penalty)
{
    check_knots(knots);
    if (w_.size() != x_.size())
        throw InvalidInput("spline weights and knots differ in length");
    if (std::any_of(w_.begin(), w_.end(), [](double w) { return !(w > 0.0) || !std::isfinite(w); }))
        throw InvalidInput("spline weights must be positive and finite");
    if (!(penalty >= 0.0) || !std::isfinite(penalty))
        throw InvalidInput("smoothing penalty must be non-negative and finite");

    const std::size_t n = x_.size();
    const std::size_t m = n - 2;
    h_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        h_[i] = x_[i + 1] - x_[i];

    auto q = [&](std::size_t row, std::size_t col) -> double {
        if (row == col)
            return 1.0 / h_[col];
        if (row == col + 1)
            return -1.0 / h_[col] - 1.0 / h_[col + 1];
        if (row == col + 2)
            return 1.0 / h_[col + 1];
        return 0.0;
    };
    // Band of B = R + p Q^T W^-1 Q.
    std::vector<double> b0(m, 0.0), b1(m, 0.0), b2(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        b0[j] = (h_[j] + h_[j + 1]) / 3.0;
        if (j + 1 < m)
            b1[j] = h_[j + 1] / 6.0;
        if (penalty_ > 0.0) {
            for (std::size_t k = j; k < std::min(m, j + 3); ++k) {
                double s = 0.0;
                for (std::size_t row = k; row <= j + 2; ++row)
                    s += q(row, j) * q(row, k) / w_[row];
                (k == j ? b0[j] : k == j + 1 ? b1[j] : b2[j]) += penalty_ * s;
            }
        }
    }

    d_.assign(m, 0.0);
    l1_.assign(m, 0.0);
    l2_.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double dj = b0[j];
        if (j >= 1)
            dj -= l1_[j - 1] * l1_[j - 1] * d_[j - 1];
        if (j >= 2)
            dj -= l2_[j - 2] * l2_[j - 2] * d_[j - 2];
        if (!(dj > 0.0))
            throw InvalidInput("smoothing system is not positive definite");
        d_[j] = dj;
        if (j + 1 < m) {
            double v = b1[j];
            if (j >= 1)
                v -= l2_[j - 1] * d_[j - 1] * l1_[j - 1];
            l1_[j] = v / dj;
        }
        if (j + 2 < m)
            l2_[j] = b2[j] / dj;
    }
}

CubicSpline SplineSmoother::fit(std::span<const double> y) const
{
    const std::size_t n = x_.size();
    const std::size_t m = n - 2;
    if (y.size() != n)
        throw InvalidInput("spline values and knots differ in length");

    // Right-hand side Q^T y.
    std::vector<double> gamma(m);
    for (std::size_t j = 0; j < m; ++j)
        gamma[j] = (y[j + 2] - y[j + 1]) / h_[j + 1] - (y[j + 1] - y[j]) / h_[j];

    for (std::size_t j = 0; j < m; ++j) {
        if (j >= 1)
            gamma[j] -= l1_[j - 1] * gamma[j - 1];
        if (j >= 2)
            gamma[j] -= l2_[j - 2] * gamma[j - 2];
    }
    for (std::size_t j = 0; j < m; ++j)
        gamma[j] /= d_[j];
    for (std::size_t jj = m; jj-- > 0;) {
        if (jj + 1 < m)
            gamma[jj] -= l1_[jj] * gamma[jj + 1];
        if (jj + 2 < m)
            gamma[jj] -= l2_[jj] * gamma[jj + 2];
    }

    std::vector<double> g(y.begin(), y.end());
    if (penalty_ > 0.0) {
        // g = y - p W^-1 Q gamma
        for (std::size_t i = 0; i < n; ++i) {
            double qg = 0.0;
            if (i < m)
                qg += gamma[i] / h_[i];
            if (i >= 1 && i - 1 < m)
                qg += gamma[i - 1] * (-1.0 / h_[i - 1] - 1.0 / h_[i]);
            if (i >= 2 && i - 2 < m)
                qg += gamma[i - 2] / h_[i - 1];
            g[i] -= penalty_ * qg / w_[i];
        }
    }

    std::vector<double> second(n, 0.0);
    std::copy(gamma.begin(), gamma.end(), second.begin() + 1);
    return CubicSpline(x_, std::move(g), std::move(second));
}

double SplineSmoother::residual_dof() const
{
    if (penalty_ == 0.0)
        return 0.0;
    const std::size_t n = x_.size();
    const std::size_t m = n - 2;

    // Band (width 2) of B^-1 from the LDL^T factors.
    std::vector<double> s0(m, 0.0), s1(m, 0.0), s2(m, 0.0);
    auto at = [&](std::size_t a, std::size_t b) -> double {
        if (a > b)
            std::swap(a, b);
        if (b >= m)
            return 0.0;
        switch (b - a) {
        case 0: return s0[a];
        case 1: return s1[a];
        case 2: return s2[a];
        default: return 0.0;
        }
    };
    for (std::size_t i = m; i-- > 0;) {
        const double a1 = i + 1 < m ? l1_[i] : 0.0;
        const double a2 = i + 2 < m ? l2_[i] : 0.0;
        s2[i] = -a1 * at(i + 1, i + 2) - a2 * at(i + 2, i + 2);
        s1[i] = -a1 * at(i + 1, i + 1) - a2 * at(i + 2, i + 1);
        s0[i] = 1.0 / d_[i] - a1 * s1[i] - a2 * s2[i];
    }

    auto q = [&](std::size_t row, std::size_t col) -> double {
        if (row == col)
            return 1.0 / h_[col];
        if (row == col + 1)
            return -1.0 / h_[col] - 1.0 / h_[col + 1];
        if (row == col + 2)
            return 1.0 / h_[col + 1];
        return 0.0;
    };
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= 2 ? i - 2 : 0;
        const std::size_t hi = std::min(i, m - 1);
        double diag = 0.0;
        for (std::size_t j = lo; j <= hi; ++j)
            for (std::size_t k = lo; k <= hi; ++k)
                diag += q(i, j) * q(i, k) * at(j, k);
        trace += diag / w_[i];
    }
    return penalty_ * trace;
}

CubicSpline interpolating_spline(std::span<const double> x, std::span<const double> y)
{
    const std::vector<double> ones(x.size(), 1.0);
    return SplineSmoother(x, ones, 0.0).fit(y);
}

namespace {

struct GcvPoint {
    double log_rho;
    double score;
};

} // namespace

SmoothingFit smoothing_spline(std::span<const double> x, std::span<const double> y, std::span<const double> weights,
                              std::optional<double> penalty)
{
    check_knots(x);
    if (y.size() != x.size() || weights.size() != x.size())
        throw InvalidInput("smoothing_spline: input lengths differ");

    const std::size_t n = x.size();
    auto evaluate = [&](double p) {
        SplineSmoother smoother(x, weights, p);
        auto spline = smoother.fit(y);
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - spline.values()[i];
            rss += weights[i] * r * r;
        }
        const double dof = smoother.residual_dof();
        const double nn = static_cast<double>(n);
        const double score = dof > 0.0 ? (rss / nn) / ((dof / nn) * (dof / nn))
                                       : std::numeric_limits<double>::infinity();
        return SmoothingFit{std::move(spline), p, score, nn - dof};
    };

    if (penalty)
        return evaluate(*penalty);

    // Natural penalty scale: ratio of the roughness and data terms' traces.
    double tr_r = 0.0;
    double tr_s = 0.0;
    for (std::size_t j = 0; j + 2 < n; ++j) {
        const double h0 = x[j + 1] - x[j];
        const double h1 = x[j + 2] - x[j + 1];
        tr_r += (h0 + h1) / 3.0;
        tr_s += 1.0 / (h0 * h0 * weights[j]) + (1.0 / h0 + 1.0 / h1) * (1.0 / h0 + 1.0 / h1) / weights[j + 1] +
                1.0 / (h1 * h1 * weights[j + 2]);
    }
    const double scale = tr_r / tr_s;

    constexpr double lo = -6.0;
    constexpr double hi = 14.0;
    constexpr int steps = 80;
    auto score_at = [&](double log_rho) { return evaluate(scale * std::pow(10.0, log_rho)).gcv_score; };

    std::vector<GcvPoint> grid;
    grid.reserve(steps + 1);
    for (int k = 0; k <= steps; ++k) {
        const double lr = lo + (hi - lo) * k / steps;
        grid.push_back({lr, score_at(lr)});
    }
    const auto best = std::min_element(grid.begin(), grid.end(),
                                       [](const GcvPoint& a, const GcvPoint& b) { return a.score < b.score; });
    const auto idx = static_cast<std::size_t>(std::distance(grid.begin(), best));
    double a = grid[idx == 0 ? 0 : idx - 1].log_rho;
    double b = grid[std::min(idx + 1, grid.size() - 1)].log_rho;

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = score_at(c);
    double fd = score_at(d);
    for (int it = 0; it < 40; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = score_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = score_at(d);
        }
    }
    double best_lr = fc < fd ? c : d;
    if (best->score < std::min(fc, fd))
        best_lr = best->log_rho;
    return evaluate(scale * std::pow(10.0, best_lr));
}

} // namespace ncring
