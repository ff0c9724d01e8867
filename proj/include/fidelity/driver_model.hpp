#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fidelity/attempts.hpp"
#include "fidelity/layout.hpp"
#include "fidelity/path.hpp"

namespace fidelity {

/// Steering rate = -gain * (yaw rate - desired yaw rate), delayed by response_delay.
struct DpyreConfig {
  double gain = 13.0;            // steering-wheel rate per yaw-rate error
  double response_delay = 0.3;   // s
  double preview_time = 1.0;     // s

  void validate() const;
};

enum class ModelKind { Dpyre, Idpyre };
std::string_view to_string(ModelKind model);
std::optional<ModelKind> parse_model(std::string_view text);

struct FitGrid {
  double delay_min = 0.0, delay_max = 1.0, delay_step = 0.05;
  double preview_min = 0.5, preview_max = 3.0, preview_step = 0.25;
  double burst_min = 0.2, burst_max = 1.0, burst_step = 0.1;
  double threshold_fraction = 0.2;     // of the percentile below
  double threshold_percentile = 90.0;  // of |sw_rate|
  double min_separation = 0.1;         // s, bursts closer than this are merged
  double min_speed = 2.0;              // m/s, slower samples are not scored

  std::vector<double> delays() const;
  std::vector<double> previews() const;
  std::vector<double> burst_durations() const;
  void validate() const;
};

struct ModelFit {
  ModelKind model = ModelKind::Dpyre;
  double gain = 0.0;  // K for the continuous model, k for the intermittent one
  double response_delay = 0.0;
  double preview_time = 0.0;
  double rms_error = 0.0;  // rad/s
  double r_squared = 0.0;
  std::optional<double> avg_adjustment_magnitude;  // rad
  std::optional<int> n_adjustments;
  std::optional<double> burst_duration;  // s
  bool degenerate = false;  // target steering rate has zero variance
  std::size_t n_scored = 0;
};

struct AdjustmentBurst {
  double t_onset = 0.0;
  double amplitude = 0.0;  // rad, integral of the steering rate over the burst
  double duration = 0.0;
};

/// Yaw rate of the constant-curvature arc from the pose through the path
/// point `speed * preview_time` ahead of the nearest path point. Throws
/// FitError when that point is closer than 1 cm.
double desired_yaw_rate(const Pose2& pose, double speed, const PathGeometry& path, double preview_time);

/// Same, with the nearest path arc parameter already known.
double desired_yaw_rate_from(const Pose2& pose, double speed, const PathGeometry& path, double nearest_s,
                             double preview_time);

/// Follows the nearest path point along a trajectory: global search on the
/// first query, local search around the previous answer afterwards.
class PathTracker {
 public:
  explicit PathTracker(const PathGeometry& path) : path_(&path) {}
  double nearest(Point2 p);

 private:
  const PathGeometry* path_;
  std::optional<double> last_;
};

/// Speed used for the preview distance; slower samples are treated as moving at min_speed.
inline double preview_speed(double speed, double min_speed) { return speed > min_speed ? speed : min_speed; }

/// yaw_rate - desired yaw rate for every sample (samples must carry yaw_rate).
std::vector<double> yaw_rate_error(std::span<const TrajectorySample> samples, const PathGeometry& path,
                                   double preview_time, double min_speed = 2.0);

/// Open-loop prediction of the steering-wheel rate. The delay is rounded to
/// whole samples and the first delayed samples are zero.
std::vector<double> dpyre_predict(std::span<const TrajectorySample> samples, const PathGeometry& path,
                                  const DpyreConfig& cfg, double sample_rate, double min_speed = 2.0);
std::vector<double> dpyre_predict(const AttemptSegment& seg, const PathSpec& path, const DpyreConfig& cfg);

/// Grid search over delay and preview with the closed-form least-squares gain.
ModelFit fit_dpyre(std::span<const TrajectorySample> samples, const PathGeometry& path, double sample_rate,
                   const FitGrid& grid = {});
ModelFit fit_dpyre(const AttemptSegment& seg, const PathSpec& path, const FitGrid& grid = {});

/// Maximal runs of |rate| > threshold, merged across gaps shorter than min_separation.
std::vector<AdjustmentBurst> detect_adjustments(std::span<const double> sw_rate, double sample_rate,
                                                double rate_threshold, double min_separation);

/// Unit-area minimum-jerk rate profile on [0, 1]: 30 t^2 (1 - t)^2.
double min_jerk_pulse(double tau);

/// Adds a minimum-jerk rate pulse of the given area and width, starting at
/// `onset` (s from the first sample), sampled at the sample instants.
void add_min_jerk_pulse(std::vector<double>& rate, double sample_rate, double onset, double amplitude,
                        double duration);

/// Intermittent variant: adjustment amplitudes regressed on the delayed yaw
/// rate error at their onsets, reconstructed as minimum-jerk pulses.
ModelFit fit_intermittent_dpyre(std::span<const TrajectorySample> samples, const PathGeometry& path,
                                double sample_rate, const FitGrid& grid = {});
ModelFit fit_intermittent_dpyre(const AttemptSegment& seg, const PathSpec& path, const FitGrid& grid = {});

/// Mean |amplitude| of a burst list (0 when empty).
double average_adjustment_magnitude(std::span<const AdjustmentBurst> bursts);

/// Desired path used when fitting an aligned attempt: the layout's nominal
/// path, except CLV where the circle takes the attempt's median radius.
PathSpec fitting_path(const AttemptSegment& seg, const TaskLayout& layout, double min_speed = 2.0);

}  // namespace fidelity
