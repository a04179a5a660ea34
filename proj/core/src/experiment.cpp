#include "ncring/experiment.hpp"

#include "ncring/errors.hpp"
#include "ncring/prng.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace ncring {

double NoiseModel::sd(double current) const noexcept
{
    const double rel = relative_sigma * std::abs(current);
    return std::sqrt(rel * rel + absolute_sigma * absolute_sigma);
}

void MeasurementSeries::validate() const
{
    if (points.size() < min_measurement_points)
        throw InvalidInput(fmt::format("measurement series needs at least {} points, has {}", min_measurement_points,
                                       points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].f > 0.0))
            throw InvalidInput(fmt::format("point {}: flux must be positive", i));
        if (i > 0 && !(points[i].f > points[i - 1].f))
            throw InvalidInput(fmt::format("point {}: flux must be strictly increasing", i));
        if (!std::isfinite(points[i].current))
            throw InvalidInput(fmt::format("point {}: current is not finite", i));
    }
}

std::vector<double> make_grid(double f_min, double f_max, std::size_t n_points, GridSpacing spacing)
{
    if (n_points < 2)
        throw InvalidGrid("grid needs at least 2 points");
    if (!(f_min < f_max) || !std::isfinite(f_min) || !std::isfinite(f_max))
        throw InvalidGrid("grid requires finite f_min < f_max");
    if (spacing == GridSpacing::log && !(f_min > 0.0))
        throw InvalidGrid("log-spaced grid requires f_min > 0");

    std::vector<double> grid(n_points);
    const double last = static_cast<double>(n_points - 1);
    if (spacing == GridSpacing::linear) {
        for (std::size_t i = 0; i < n_points; ++i)
            grid[i] = f_min + (f_max - f_min) * (static_cast<double>(i) / last);
    } else {
        const double lo = std::log(f_min);
        const double hi = std::log(f_max);
        for (std::size_t i = 0; i < n_points; ++i)
            grid[i] = std::exp(lo + (hi - lo) * (static_cast<double>(i) / last));
    }
    grid.front() = f_min;
    grid.back() = f_max;
    return grid;
}

MeasurementSeries generate_dataset(const RingConfig& config, double f_min, double f_max, std::size_t n_points,
                                   GridSpacing spacing, const NoiseModel& noise)
{
    config.validate();
    if (!(noise.relative_sigma >= 0.0) || !(noise.absolute_sigma >= 0.0))
        throw InvalidParameter("noise sigmas must be non-negative");
    const double fnc = f_nc(config);
    if (!(f_min > 0.0) || !(f_min < f_max) || !(f_max <= 0.5 + fnc))
        throw InvalidGrid(fmt::format("generate_dataset requires 0 < f_min < f_max <= 1/2 + f_nc (= {})", 0.5 + fnc));
    if (n_points < min_measurement_points)
        throw InvalidGrid(fmt::format("generate_dataset requires n_points >= {}", min_measurement_points));

    const auto grid = make_grid(f_min, f_max, n_points, spacing);

    MeasurementSeries series;
    series.points.reserve(n_points);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double exact = persistent_current(config, grid[i]);
        double current = exact;
        if (!noise.noiseless())
            current += noise.sd(exact) * standard_normal(noise.seed, i);
        series.points.push_back({grid[i], current});
    }
    series.meta.radius_m = config.radius;
    series.meta.n_electrons = config.n_electrons;
    series.meta.noise = noise;
    return series;
}

std::string format_double(double value)
{
    return fmt::format("{:.17g}", value);
}

void write_csv(const MeasurementSeries& series, std::ostream& out)
{
    const auto& m = series.meta;
    out << "# schema=" << measurement_schema << '\n';
    out << "# generator=" << m.generator << '\n';
    if (m.radius_m)
        out << "# radius_m=" << format_double(*m.radius_m) << '\n';
    if (m.n_electrons)
        out << "# n_electrons=" << *m.n_electrons << '\n';
    out << "# relative_sigma=" << format_double(m.noise.relative_sigma) << '\n';
    out << "# absolute_sigma=" << format_double(m.noise.absolute_sigma) << '\n';
    out << "# seed=" << m.noise.seed << '\n';
    for (const auto& [k, v] : m.extra)
        out << "# " << k << '=' << v << '\n';
    out << "f,current_A\n";
    for (const auto& p : series.points)
        out << format_double(p.f) << ',' << format_double(p.current) << '\n';
}

void write_csv(const MeasurementSeries& series, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidInput("cannot open '" + path + "' for writing");
    write_csv(series, out);
    if (!out)
        throw InvalidInput("failed writing '" + path + "'");
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, std::string_view what)
{
    text = trim(text);
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError(line, fmt::format("cannot parse {} from '{}'", what, text));
    return value;
}

} // namespace

MeasurementSeries read_csv(std::istream& in)
{
    MeasurementSeries series;
    auto& meta = series.meta;
    meta.generator.clear();

    bool header_seen = false;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty())
            continue;
        if (line.front() == '#') {
            if (header_seen)
                throw ParseError(line_no, "metadata comment after the data header");
            const auto body = trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos)
                continue;
            const std::string key(trim(body.substr(0, eq)));
            const std::string value(trim(body.substr(eq + 1)));
            if (key == "schema") {
                if (value != measurement_schema)
                    throw ParseError(line_no, "unsupported schema '" + value + "'");
            } else if (key == "generator") {
                meta.generator = value;
            } else if (key == "radius_m") {
                meta.radius_m = parse_number<double>(value, line_no, "radius_m");
            } else if (key == "n_electrons") {
                meta.n_electrons = parse_number<long long>(value, line_no, "n_electrons");
            } else if (key == "relative_sigma") {
                meta.noise.relative_sigma = parse_number<double>(value, line_no, "relative_sigma");
            } else if (key == "absolute_sigma") {
                meta.noise.absolute_sigma = parse_number<double>(value, line_no, "absolute_sigma");
            } else if (key == "seed") {
                meta.noise.seed = parse_number<std::uint64_t>(value, line_no, "seed");
            } else {
                meta.extra.emplace_back(key, value);
            }
            continue;
        }
        if (!header_seen) {
            if (line != "f,current_A")
                throw ParseError(line_no, "expected data header 'f,current_A'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
            throw ParseError(line_no, "expected exactly two comma-separated fields");
        MeasurementPoint p;
        p.f = parse_number<double>(line.substr(0, comma), line_no, "flux");
        p.current = parse_number<double>(line.substr(comma + 1), line_no, "current");
        if (!(p.f > 0.0))
            throw ParseError(line_no, "flux must be positive");
        if (!std::isfinite(p.current))
            throw ParseError(line_no, "current must be finite");
        if (!series.points.empty() && !(p.f > series.points.back().f))
            throw ParseError(line_no, "flux values must be strictly increasing");
        series.points.push_back(p);
    }
    if (!header_seen)
        throw ParseError(line_no, "missing data header 'f,current_A'");
    if (series.points.size() < min_measurement_points)
        throw ParseError(line_no, fmt::format("need at least {} data rows, found {}", min_measurement_points,
                                        series.points.size()));
    return series;
}

MeasurementSeries read_csv_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidInput("cannot open '" + path + "'");
    return read_csv(in);
}

} // namespace ncring
