#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fidelity {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGravity = 9.81;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Removes 2*pi jumps so consecutive values differ by at most pi.
std::vector<double> unwrap_angles(std::span<const double> angles);

double mean(std::span<const double> values);

/// Sample standard deviation with the n-1 denominator; 0 for fewer than two values.
double sample_sd(std::span<const double> values);

/// Median; the mean of the two central values for even counts. Requires a nonempty input.
double median(std::vector<double> values);

/// Linear-interpolated percentile, p in [0, 100]. Requires a nonempty input.
double percentile(std::vector<double> values, double p);

/// Number of samples on each side of the centre for a centred window of `window_s` seconds.
std::size_t half_window_samples(double window_s, double sample_rate);

/// Centred moving average. Near the ends the window shrinks symmetrically so
/// that linear signals are reproduced exactly.
std::vector<double> moving_average(std::span<const double> values, std::size_t half_window);

/// Central differences at interior points, one-sided at the ends.
std::vector<double> central_difference(std::span<const double> values, double dt);

/// Index and signed value of an extremum found by find_peaks.
struct Peak {
  std::size_t index;
  double value;
  double prominence;
};

/// Local maxima whose topographic prominence is at least `min_prominence`.
/// Plateaus report their first index.
std::vector<Peak> find_maxima(std::span<const double> values, double min_prominence);

/// Local minima (reported with their original, negative-going values).
std::vector<Peak> find_minima(std::span<const double> values, double min_prominence);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

}  // namespace fidelity
