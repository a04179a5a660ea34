#pragma once

#include "ncring/ring.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ncring {

inline constexpr const char* measurement_schema = "ncring-measurement-v1";
inline constexpr const char* generator_version = "ncring-generate-1";
inline constexpr std::size_t min_measurement_points = 8;

/// Gaussian instrument noise: sd_i = sqrt((relative_sigma |J_i|)^2 + absolute_sigma^2).
struct NoiseModel {
    double relative_sigma = 0.0;
    double absolute_sigma = 0.0; // A
    std::uint64_t seed = 0;

    [[nodiscard]] bool noiseless() const noexcept { return relative_sigma == 0.0 && absolute_sigma == 0.0; }
    [[nodiscard]] double sd(double current) const noexcept;
};

struct MeasurementPoint {
    double f = 0.0;       // phi0 units
    double current = 0.0; // A
};

struct MeasurementMeta {
    std::optional<double> radius_m;
    std::optional<long long> n_electrons;
    NoiseModel noise{};
    std::string generator = generator_version;
    /// Extra key=value header pairs, kept in file order.
    std::vector<std::pair<std::string, std::string>> extra;
};

struct MeasurementSeries {
    std::vector<MeasurementPoint> points;
    MeasurementMeta meta;

    /// Throws InvalidInput unless f is positive, strictly increasing and there
    /// are at least min_measurement_points samples.
    void validate() const;
};

enum class GridSpacing { linear, log };

/// n_points flux values from f_min to f_max inclusive.
[[nodiscard]] std::vector<double> make_grid(double f_min, double f_max, std::size_t n_points, GridSpacing spacing);

/// Samples persistent_current on the grid and adds seeded Gaussian noise.
/// Requires 0 < f_min < f_max <= 1/2 + f_nc and n_points >= 8.
[[nodiscard]] MeasurementSeries generate_dataset(const RingConfig& config, double f_min, double f_max,
                                                 std::size_t n_points, GridSpacing spacing, const NoiseModel& noise);

/// Writes the measurement CSV: '#' key=value header lines, then `f,current_A`
/// rows in 17-significant-digit decimal.
void write_csv(const MeasurementSeries& series, std::ostream& out);
void write_csv(const MeasurementSeries& series, const std::string& path);

[[nodiscard]] MeasurementSeries read_csv(std::istream& in);
[[nodiscard]] MeasurementSeries read_csv_file(const std::string& path);

/// Shortest-round-trip-safe decimal text (17 significant digits).
[[nodiscard]] std::string format_double(double value);

} // namespace ncring
