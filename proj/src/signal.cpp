#include "fidelity/signal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fidelity {

double wrap_angle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

std::vector<double> unwrap_angles(std::span<const double> angles) {
  std::vector<double> out(angles.begin(), angles.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    out[i] = out[i - 1] + wrap_angle(angles[i] - angles[i - 1]);
  }
  return out;
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sequence");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of empty sequence");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::size_t half_window_samples(double window_s, double sample_rate) {
  if (window_s <= 0.0) return 0;
  return static_cast<std::size_t>(std::lround(0.5 * window_s * sample_rate));
}

std::vector<double> moving_average(std::span<const double> values, std::size_t half_window) {
  const std::size_t n = values.size();
  std::vector<double> out(n);
  if (n == 0) return out;
  // Prefix sums keep this O(n) for long windows.
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + values[i];
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = std::min({half_window, i, n - 1 - i});
    const double sum = prefix[i + h + 1] - prefix[i - h];
    out[i] = sum / static_cast<double>(2 * h + 1);
  }
  return out;
}

std::vector<double> central_difference(std::span<const double> values, double dt) {
  const std::size_t n = values.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  out[0] = (values[1] - values[0]) / dt;
  out[n - 1] = (values[n - 1] - values[n - 2]) / dt;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (values[i + 1] - values[i - 1]) / (2.0 * dt);
  return out;
}

std::vector<Peak> find_maxima(std::span<const double> values, double min_prominence) {
  std::vector<Peak> peaks;
  const std::size_t n = values.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(values[i] > values[i - 1])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && values[j + 1] == values[i]) ++j;
    if (j + 1 >= n || !(values[j + 1] < values[i])) {
      i = j + 1;
      continue;
    }
    const double peak = values[i];
    double left_min = peak;
    for (std::size_t k = i; k-- > 0;) {
      if (values[k] > peak) break;
      left_min = std::min(left_min, values[k]);
    }
    double right_min = peak;
    for (std::size_t k = j + 1; k < n; ++k) {
      if (values[k] > peak) break;
      right_min = std::min(right_min, values[k]);
    }
    const double prominence = peak - std::max(left_min, right_min);
    if (prominence >= min_prominence) peaks.push_back({i, peak, prominence});
    i = j + 1;
  }
  return peaks;
}

std::vector<Peak> find_minima(std::span<const double> values, double min_prominence) {
  std::vector<double> negated(values.size());
  std::transform(values.begin(), values.end(), negated.begin(), [](double v) { return -v; });
  auto peaks = find_maxima(negated, min_prominence);
  for (auto& p : peaks) p.value = -p.value;
  return peaks;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace fidelity
