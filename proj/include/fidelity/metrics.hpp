#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fidelity/attempts.hpp"
#include "fidelity/layout.hpp"

namespace fidelity {

struct Metric {
  std::string name;
  double value = 0.0;
  std::string unit;  // count, m/s, m/s^2, m, Hz, s, rad, rad/s, 1
};

struct MetricSet {
  TaskKind task = TaskKind::Lct;
  std::vector<Metric> entries;

  const Metric* find(std::string_view name) const;
  double at(std::string_view name) const;  // throws std::out_of_range when absent
};

/// Measures reported for a task, aggregate ones first.
std::vector<std::string> metric_names(TaskKind task);
std::vector<std::string> aggregate_metric_names(TaskKind task);
std::vector<std::string> timeseries_metric_names(TaskKind task);

inline constexpr double kSwrrSmoothing = 0.1;  // s
inline constexpr double kDegree = 3.14159265358979323846 / 180.0;

/// Steering reversals of the 0.1 s-smoothed angle per second. The smoothed
/// signal is reduced to alternating turning points, each separated from the
/// previous one by at least `gap`; every turning point strictly inside the
/// series counts as one reversal.
double swrr(std::span<const double> swa, double duration, double gap, double sample_rate);

/// Inclusive sample range analysed for a task (see the README for the window rules).
struct SampleWindow {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const { return last - first + 1; }
};
SampleWindow manoeuvre_window(std::span<const TrajectorySample> samples, const TaskLayout& layout);

/// Returns the segment samples with yaw_rate, lat_accel and sw_rate present.
std::vector<TrajectorySample> complete_kinematics(const AttemptSegment& seg);

MetricSet aggregate_metrics(const AttemptSegment& seg, const TaskLayout& layout);
MetricSet timeseries_metrics(const AttemptSegment& seg, const TaskLayout& layout);
/// Both sets concatenated in report order.
MetricSet attempt_metrics(const AttemptSegment& seg, const TaskLayout& layout);

/// Lateral peaks (smoothed 0.2 s, prominence 0.5 m) inside the slalom, as |y| values.
std::vector<double> slalom_peak_amplitudes(std::span<const TrajectorySample> samples, const TaskLayout& layout,
                                           double sample_rate);

}  // namespace fidelity
