#include "fidelity/kinematics.hpp"

#include <cmath>
#include <vector>

#include "fidelity/errors.hpp"
#include "fidelity/signal.hpp"

namespace fidelity {

namespace {

double lerp(double a, double b, double f) { return a + f * (b - a); }

std::optional<double> lerp_opt(const std::optional<double>& a, const std::optional<double>& b, double f) {
  if (!a || !b) return std::nullopt;
  return lerp(*a, *b, f);
}

}  // namespace

DriveLog resample_uniform(const DriveLog& log, double rate) {
  if (log.samples.size() < 2) throw ValidationError("resampling requires at least 2 samples");
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ValidationError("resampling rate must be positive");

  // Continuous heading so interpolation follows the shortest arc.
  std::vector<double> raw_heading;
  raw_heading.reserve(log.samples.size());
  for (const auto& s : log.samples) raw_heading.push_back(s.heading);
  const auto heading = unwrap_angles(raw_heading);

  DriveLog out;
  out.meta = log.meta;
  out.meta.sample_rate = rate;
  const double t0 = log.samples.front().t;
  const double t1 = log.samples.back().t;
  const double period = 1.0 / rate;
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) * rate + 1e-9)) + 1;
  out.samples.reserve(n);

  std::size_t j = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * period;
    while (j + 2 < log.samples.size() && log.samples[j + 1].t <= t) ++j;
    const auto& a = log.samples[j];
    const auto& b = log.samples[j + 1];
    const double f = std::min(1.0, std::max(0.0, (t - a.t) / (b.t - a.t)));
    TrajectorySample s;
    s.t = t;
    // Exact hits keep the source value bit-for-bit.
    if (f == 0.0) {
      s = a;
      s.t = t;
      s.heading = heading[j];
    } else if (f == 1.0) {
      s = b;
      s.t = t;
      s.heading = heading[j + 1];
    } else {
      s.x = lerp(a.x, b.x, f);
      s.y = lerp(a.y, b.y, f);
      s.heading = lerp(heading[j], heading[j + 1], f);
      s.speed = lerp(a.speed, b.speed, f);
      s.yaw_rate = lerp_opt(a.yaw_rate, b.yaw_rate, f);
      s.lat_accel = lerp_opt(a.lat_accel, b.lat_accel, f);
      s.swa = lerp(a.swa, b.swa, f);
      s.sw_rate = lerp_opt(a.sw_rate, b.sw_rate, f);
    }
    out.samples.push_back(s);
  }
  return out;
}

bool is_uniform(const DriveLog& log, double tol) {
  const double period = 1.0 / log.meta.sample_rate;
  for (std::size_t i = 1; i < log.samples.size(); ++i) {
    if (std::abs(log.samples[i].t - log.samples[i - 1].t - period) > tol) return false;
  }
  return true;
}

DriveLog derive_kinematics(const DriveLog& log, double smooth_window) {
  if (!is_uniform(log)) throw ValidationError("derive_kinematics requires uniform sampling");
  if (smooth_window < 0.0) throw ValidationError("smoothing window must be non-negative");
  DriveLog out = log;
  const std::size_t n = out.samples.size();
  if (n < 2) return out;
  const double dt = 1.0 / log.meta.sample_rate;
  const std::size_t half = half_window_samples(smooth_window, log.meta.sample_rate);

  std::vector<double> heading(n), swa(n);
  for (std::size_t i = 0; i < n; ++i) {
    heading[i] = out.samples[i].heading;
    swa[i] = out.samples[i].swa;
  }
  const auto yaw = central_difference(moving_average(unwrap_angles(heading), half), dt);
  const auto swr = central_difference(moving_average(swa, half), dt);

  for (std::size_t i = 0; i < n; ++i) {
    auto& s = out.samples[i];
    if (!s.yaw_rate) s.yaw_rate = yaw[i];
    if (!s.lat_accel) s.lat_accel = s.speed * *s.yaw_rate;
    if (!s.sw_rate) s.sw_rate = swr[i];
  }
  return out;
}

}  // namespace fidelity
