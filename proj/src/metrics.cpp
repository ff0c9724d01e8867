#include "fidelity/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fidelity/cone_contact.hpp"
#include "fidelity/errors.hpp"
#include "fidelity/kinematics.hpp"
#include "fidelity/signal.hpp"

namespace fidelity {

const Metric* MetricSet::find(std::string_view name) const {
  for (const auto& m : entries) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

double MetricSet::at(std::string_view name) const {
  if (const Metric* m = find(name)) return m->value;
  throw std::out_of_range("metric '" + std::string(name) + "' not present");
}

std::vector<std::string> aggregate_metric_names(TaskKind task) {
  switch (task) {
    case TaskKind::Lct: return {"cones_hit", "speed_var", "max_lat_accel"};
    case TaskKind::Slx: return {"cones_hit", "speed_var"};
    case TaskKind::Clv: return {"speed_var", "radius_var"};
  }
  return {};
}

std::vector<std::string> timeseries_metric_names(TaskKind task) {
  switch (task) {
    case TaskKind::Lct: return {"initial_speed", "total_lat_travel", "swrr_1", "swrr_10"};
    case TaskKind::Slx: return {"avg_speed", "peak_lat_amp", "peak_lat_amp_var", "swrr_1", "swrr_10"};
    case TaskKind::Clv: return {"avg_speed", "avg_radius", "swrr_1", "swrr_10"};
  }
  return {};
}

std::vector<std::string> metric_names(TaskKind task) {
  auto names = aggregate_metric_names(task);
  for (auto& n : timeseries_metric_names(task)) names.push_back(std::move(n));
  return names;
}

double swrr(std::span<const double> swa, double duration, double gap, double sample_rate) {
  if (!(duration > 0.0)) throw ValidationError("SWRR duration must be positive");
  if (!(gap > 0.0)) throw ValidationError("SWRR gap must be positive");
  const std::size_t n = swa.size();
  if (n < 3) return 0.0;
  const auto x = moving_average(swa, half_window_samples(kSwrrSmoothing, sample_rate));

  // Zig-zag reduction: a turning point is confirmed once the signal has moved
  // back from it by at least `gap`.
  int dir = 0;
  std::size_t hi = 0, lo = 0, cand = 0;
  int count = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (dir == 0) {
      if (x[i] > x[hi]) hi = i;
      if (x[i] < x[lo]) lo = i;
      if (x[i] - x[lo] >= gap) {
        if (lo != 0) ++count;
        dir = 1;
        cand = i;
      } else if (x[hi] - x[i] >= gap) {
        if (hi != 0) ++count;
        dir = -1;
        cand = i;
      }
    } else if (dir > 0) {
      if (x[i] > x[cand]) {
        cand = i;
      } else if (x[cand] - x[i] >= gap) {
        ++count;
        dir = -1;
        cand = i;
      }
    } else {
      if (x[i] < x[cand]) {
        cand = i;
      } else if (x[i] - x[cand] >= gap) {
        ++count;
        dir = 1;
        cand = i;
      }
    }
  }
  // The last swing is at least `gap` by construction; count its end when the signal turned afterwards.
  if (dir != 0 && cand < n - 1) ++count;
  return count / duration;
}

namespace {

double distance_from_origin(const TrajectorySample& s) { return std::hypot(s.x, s.y); }

SampleWindow x_window(std::span<const TrajectorySample> samples, double x_begin, double x_end) {
  std::size_t i = 0;
  while (i < samples.size() && samples[i].x < x_begin) ++i;
  if (i == samples.size()) throw ProcessingError("empty manoeuvre window: the attempt never reaches the entry gate");
  std::size_t j = i;
  while (j + 1 < samples.size() && samples[j + 1].x <= x_end) ++j;
  if (samples[j].x > x_end) throw ProcessingError("empty manoeuvre window");
  return {i, j};
}

template <typename F>
std::vector<double> collect(std::span<const TrajectorySample> samples, SampleWindow w, F f) {
  std::vector<double> out;
  out.reserve(w.size());
  for (std::size_t i = w.first; i <= w.last; ++i) out.push_back(f(samples[i]));
  return out;
}

/// First-second and final-second sub-windows of a window.
SampleWindow leading_second(std::span<const TrajectorySample> s, SampleWindow w) {
  std::size_t j = w.first;
  while (j + 1 <= w.last && s[j + 1].t < s[w.first].t + 1.0) ++j;
  return {w.first, j};
}

SampleWindow trailing_second(std::span<const TrajectorySample> s, SampleWindow w) {
  std::size_t i = w.last;
  while (i > w.first && s[i - 1].t > s[w.last].t - 1.0) --i;
  return {i, w.last};
}

/// Each sample represents one sample period.
double window_duration(SampleWindow w, double rate) { return static_cast<double>(w.size()) / rate; }

int cones_hit(const AttemptSegment& seg, const TaskLayout& layout) {
  if (seg.cone_hits) return *seg.cone_hits;
  return count_cone_hits(seg.samples, layout);
}

}  // namespace

SampleWindow manoeuvre_window(std::span<const TrajectorySample> samples, const TaskLayout& layout) {
  if (samples.empty()) throw ProcessingError("empty manoeuvre window: attempt has no samples");
  switch (layout.task) {
    case TaskKind::Lct: return x_window(samples, entry_gate_x(layout), final_gate_x(layout));
    case TaskKind::Slx: return x_window(samples, entry_gate_x(layout), final_gate_x(layout) + 25.0);
    case TaskKind::Clv: {
      double vmax = 0.0;
      for (const auto& s : samples) vmax = std::max(vmax, s.speed);
      if (!(vmax > 0.0)) throw ProcessingError("empty manoeuvre window: vehicle never moves");
      std::size_t i = 0;
      while (samples[i].speed < 0.9 * vmax) ++i;
      std::size_t j = i;
      while (j + 1 < samples.size() && samples[j + 1].speed >= 0.8 * vmax) ++j;
      if (j <= i) throw ProcessingError("empty manoeuvre window: no steady-state phase");
      return {i, j};
    }
  }
  throw ProcessingError("unknown task");
}

std::vector<TrajectorySample> complete_kinematics(const AttemptSegment& seg) {
  const bool complete = std::all_of(seg.samples.begin(), seg.samples.end(), [](const TrajectorySample& s) {
    return s.yaw_rate && s.lat_accel && s.sw_rate;
  });
  if (complete) return seg.samples;
  DriveLog log{seg.source_meta, seg.samples};
  if (!is_uniform(log)) log = resample_uniform(log, seg.source_meta.sample_rate);
  return derive_kinematics(log).samples;
}

std::vector<double> slalom_peak_amplitudes(std::span<const TrajectorySample> samples, const TaskLayout& layout,
                                           double sample_rate) {
  const auto cones = slalom_cones(layout);
  if (cones.empty()) return {};
  const double x_lo = cones.front().x - 12.5, x_hi = cones.back().x + 12.5;
  std::vector<double> y;
  y.reserve(samples.size());
  for (const auto& s : samples) y.push_back(s.y);
  const auto smooth = moving_average(y, half_window_samples(0.2, sample_rate));
  auto peaks = find_maxima(smooth, 0.5);
  auto troughs = find_minima(smooth, 0.5);
  peaks.insert(peaks.end(), troughs.begin(), troughs.end());
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.index < b.index; });
  std::vector<double> amps;
  for (const auto& p : peaks) {
    const double x = samples[p.index].x;
    if (x >= x_lo && x <= x_hi) amps.push_back(std::abs(p.value));
  }
  return amps;
}

MetricSet aggregate_metrics(const AttemptSegment& seg, const TaskLayout& layout) {
  const auto samples = complete_kinematics(seg);
  const auto w = manoeuvre_window(samples, layout);
  MetricSet set;
  set.task = layout.task;
  const double speed_var = sample_sd(collect(samples, w, [](const auto& s) { return s.speed; }));
  switch (layout.task) {
    case TaskKind::Lct: {
      double max_lat = 0.0;
      for (std::size_t i = w.first; i <= w.last; ++i) max_lat = std::max(max_lat, std::abs(*samples[i].lat_accel));
      set.entries = {{"cones_hit", static_cast<double>(cones_hit(seg, layout)), "count"},
                     {"speed_var", speed_var, "m/s"},
                     {"max_lat_accel", max_lat, "m/s^2"}};
      break;
    }
    case TaskKind::Slx:
      set.entries = {{"cones_hit", static_cast<double>(cones_hit(seg, layout)), "count"}, {"speed_var", speed_var, "m/s"}};
      break;
    case TaskKind::Clv:
      set.entries = {{"speed_var", speed_var, "m/s"},
                     {"radius_var", sample_sd(collect(samples, w, distance_from_origin)), "m"}};
      break;
  }
  return set;
}

MetricSet timeseries_metrics(const AttemptSegment& seg, const TaskLayout& layout) {
  const auto samples = complete_kinematics(seg);
  const auto w = manoeuvre_window(samples, layout);
  const double rate = seg.source_meta.sample_rate;
  const auto swa = collect(samples, w, [](const auto& s) { return s.swa; });
  const double duration = window_duration(w, rate);
  const double swrr_1 = swrr(swa, duration, 1.0 * kDegree, rate);
  const double swrr_10 = swrr(swa, duration, 10.0 * kDegree, rate);
  const double avg_speed = mean(collect(samples, w, [](const auto& s) { return s.speed; }));

  MetricSet set;
  set.task = layout.task;
  switch (layout.task) {
    case TaskKind::Lct: {
      const auto head = leading_second(samples, w);
      const auto tail = trailing_second(samples, w);
      const double initial_speed = mean(collect(samples, head, [](const auto& s) { return s.speed; }));
      const double y0 = mean(collect(samples, head, [](const auto& s) { return s.y; }));
      const double y1 = mean(collect(samples, tail, [](const auto& s) { return s.y; }));
      set.entries = {{"initial_speed", initial_speed, "m/s"},
                     {"total_lat_travel", std::abs(y1 - y0), "m"},
                     {"swrr_1", swrr_1, "Hz"},
                     {"swrr_10", swrr_10, "Hz"}};
      break;
    }
    case TaskKind::Slx: {
      const auto amps = slalom_peak_amplitudes(samples, layout, rate);
      if (amps.size() < 2) {
        throw ProcessingError("SLX attempt has fewer than 2 detected lateral peaks (" + std::to_string(amps.size()) + ")");
      }
      set.entries = {{"avg_speed", avg_speed, "m/s"},
                     {"peak_lat_amp", mean(amps), "m"},
                     {"peak_lat_amp_var", sample_sd(amps), "m"},
                     {"swrr_1", swrr_1, "Hz"},
                     {"swrr_10", swrr_10, "Hz"}};
      break;
    }
    case TaskKind::Clv:
      set.entries = {{"avg_speed", avg_speed, "m/s"},
                     {"avg_radius", mean(collect(samples, w, distance_from_origin)), "m"},
                     {"swrr_1", swrr_1, "Hz"},
                     {"swrr_10", swrr_10, "Hz"}};
      break;
  }
  return set;
}

MetricSet attempt_metrics(const AttemptSegment& seg, const TaskLayout& layout) {
  auto set = aggregate_metrics(seg, layout);
  auto ts = timeseries_metrics(seg, layout);
  set.entries.insert(set.entries.end(), ts.entries.begin(), ts.entries.end());
  return set;
}

}  // namespace fidelity
