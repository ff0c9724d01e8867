#include "fidelity/driver_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fidelity/errors.hpp"
#include "fidelity/metrics.hpp"
#include "fidelity/signal.hpp"

namespace fidelity {

void DpyreConfig::validate() const {
  if (!(response_delay >= 0.0)) throw ValidationError("response delay must be non-negative");
  if (!(preview_time > 0.0)) throw ValidationError("preview time must be positive");
  if (!std::isfinite(gain)) throw ValidationError("gain must be finite");
}

std::string_view to_string(ModelKind model) { return model == ModelKind::Dpyre ? "DPYRE" : "IDPYRE"; }

std::optional<ModelKind> parse_model(std::string_view text) {
  if (text == "DPYRE" || text == "dpyre") return ModelKind::Dpyre;
  if (text == "IDPYRE" || text == "idpyre") return ModelKind::Idpyre;
  return std::nullopt;
}

namespace {

std::vector<double> grid_values(double lo, double hi, double step) {
  std::vector<double> v;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(lo + static_cast<double>(i) * step);
  return v;
}

void check_range(const char* name, double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw ValidationError(std::string("invalid ") + name + " grid");
}

}  // namespace

std::vector<double> FitGrid::delays() const { return grid_values(delay_min, delay_max, delay_step); }
std::vector<double> FitGrid::previews() const { return grid_values(preview_min, preview_max, preview_step); }
std::vector<double> FitGrid::burst_durations() const { return grid_values(burst_min, burst_max, burst_step); }

void FitGrid::validate() const {
  check_range("delay", delay_min, delay_max, delay_step);
  check_range("preview", preview_min, preview_max, preview_step);
  check_range("burst duration", burst_min, burst_max, burst_step);
  if (delay_min < 0.0) throw ValidationError("delay grid must be non-negative");
  if (!(preview_min > 0.0)) throw ValidationError("preview grid must be positive");
  if (!(burst_min > 0.0)) throw ValidationError("burst durations must be positive");
  if (!(threshold_fraction > 0.0)) throw ValidationError("threshold fraction must be positive");
  if (threshold_percentile < 0.0 || threshold_percentile > 100.0) throw ValidationError("threshold percentile outside [0, 100]");
}

double desired_yaw_rate_from(const Pose2& pose, double speed, const PathGeometry& path, double nearest_s,
                             double preview_time) {
  if (!(speed > 0.0)) throw ValidationError("desired yaw rate requires a positive speed");
  const Point2 target = path.point_at(nearest_s + speed * preview_time);
  const double dx = target.x - pose.x, dy = target.y - pose.y;
  const double distance = std::hypot(dx, dy);
  if (distance < 0.01) throw FitError("degenerate preview target: closer than 0.01 m");
  const double bearing = std::atan2(dy, dx) - pose.heading;
  return 2.0 * speed * std::sin(bearing) / distance;
}

double desired_yaw_rate(const Pose2& pose, double speed, const PathGeometry& path, double preview_time) {
  return desired_yaw_rate_from(pose, speed, path, path.project({pose.x, pose.y}), preview_time);
}

double PathTracker::nearest(Point2 p) {
  last_ = last_ ? path_->project_near(p, *last_, 2) : path_->project(p);
  return *last_;
}

std::vector<double> yaw_rate_error(std::span<const TrajectorySample> samples, const PathGeometry& path,
                                   double preview_time, double min_speed) {
  std::vector<double> err;
  err.reserve(samples.size());
  PathTracker tracker(path);
  for (const auto& s : samples) {
    if (!s.yaw_rate) throw ValidationError("yaw-rate error requires yaw_rate on every sample");
    const double s_near = tracker.nearest({s.x, s.y});
    const double v = preview_speed(s.speed, min_speed);
    err.push_back(*s.yaw_rate - desired_yaw_rate_from({s.x, s.y, s.heading}, v, path, s_near, preview_time));
  }
  return err;
}

std::vector<double> dpyre_predict(std::span<const TrajectorySample> samples, const PathGeometry& path,
                                  const DpyreConfig& cfg, double sample_rate, double min_speed) {
  cfg.validate();
  const auto delay = static_cast<std::size_t>(std::lround(cfg.response_delay * sample_rate));
  if (delay >= samples.size()) throw FitError("response delay exceeds the segment length");
  const auto err = yaw_rate_error(samples, path, cfg.preview_time, min_speed);
  std::vector<double> out(samples.size(), 0.0);
  for (std::size_t i = delay; i < samples.size(); ++i) out[i] = -cfg.gain * err[i - delay];
  return out;
}

std::vector<double> dpyre_predict(const AttemptSegment& seg, const PathSpec& path, const DpyreConfig& cfg) {
  const auto samples = complete_kinematics(seg);
  return dpyre_predict(samples, PathGeometry(path), cfg, seg.source_meta.sample_rate);
}

namespace {

struct Scoring {
  std::vector<double> target;      // recorded steering-wheel rate
  std::vector<std::size_t> index;  // scored samples
  double ss_tot = 0.0;
};

Scoring make_scoring(std::span<const TrajectorySample> samples, std::size_t first, double min_speed) {
  Scoring sc;
  sc.target.reserve(samples.size());
  for (const auto& s : samples) {
    if (!s.sw_rate) throw ValidationError("fitting requires sw_rate on every sample");
    sc.target.push_back(*s.sw_rate);
  }
  for (std::size_t i = first; i < samples.size(); ++i) {
    if (samples[i].speed >= min_speed) sc.index.push_back(i);
  }
  if (sc.index.empty()) throw FitError("no samples above the minimum fitting speed");
  double m = 0.0;
  for (auto i : sc.index) m += sc.target[i];
  m /= static_cast<double>(sc.index.size());
  for (auto i : sc.index) sc.ss_tot += (sc.target[i] - m) * (sc.target[i] - m);
  return sc;
}

void finish_fit(ModelFit& fit, double ss_res, const Scoring& sc) {
  const double n = static_cast<double>(sc.index.size());
  fit.rms_error = std::sqrt(ss_res / n);
  fit.n_scored = sc.index.size();
  if (sc.ss_tot > 0.0) {
    fit.r_squared = 1.0 - ss_res / sc.ss_tot;
  } else {
    fit.degenerate = true;
    // Nothing to explain: a perfect fit scores 1, any residual scores 0.
    fit.r_squared = ss_res > 0.0 ? 0.0 : 1.0;
  }
}

void check_length(std::span<const TrajectorySample> samples, double sample_rate, const FitGrid& grid) {
  if (samples.size() < 2) throw FitError("segment too short to fit");
  const double length = static_cast<double>(samples.size() - 1) / sample_rate;
  if (!(length > grid.delay_max + 2.0)) {
    throw FitError("segment of " + format_number(length) + " s is not longer than the maximum delay plus 2 s");
  }
}

}  // namespace

ModelFit fit_dpyre(std::span<const TrajectorySample> samples, const PathGeometry& path, double sample_rate,
                   const FitGrid& grid) {
  grid.validate();
  check_length(samples, sample_rate, grid);
  const auto delays = grid.delays();
  const auto previews = grid.previews();
  std::vector<std::size_t> lags;
  for (double d : delays) lags.push_back(static_cast<std::size_t>(std::lround(d * sample_rate)));
  const Scoring sc = make_scoring(samples, lags.back(), grid.min_speed);
  const auto& y = sc.target;

  std::vector<std::vector<double>> errors;
  errors.reserve(previews.size());
  for (double tp : previews) errors.push_back(yaw_rate_error(samples, path, tp, grid.min_speed));

  ModelFit best;
  best.model = ModelKind::Dpyre;
  double best_ss = std::numeric_limits<double>::infinity();
  bool excited = false;
  // Delay outer, preview inner, strict improvement only: ties keep the smaller delay, then the smaller preview.
  for (std::size_t a = 0; a < delays.size(); ++a) {
    for (std::size_t b = 0; b < previews.size(); ++b) {
      const auto& e = errors[b];
      double sxx = 0.0, sxy = 0.0;
      for (auto i : sc.index) {
        const double x = e[i - lags[a]];
        sxx += x * x;
        sxy += x * y[i];
      }
      if (sxx < 1e-12) continue;
      excited = true;
      const double gain = -sxy / sxx;
      double ss = 0.0;
      for (auto i : sc.index) {
        const double r = y[i] + gain * e[i - lags[a]];
        ss += r * r;
      }
      if (ss < best_ss) {
        best_ss = ss;
        best.gain = gain;
        best.response_delay = delays[a];
        best.preview_time = previews[b];
      }
    }
  }
  if (!excited) throw FitError("unidentifiable: no yaw-rate error excitation");
  finish_fit(best, best_ss, sc);
  return best;
}

ModelFit fit_dpyre(const AttemptSegment& seg, const PathSpec& path, const FitGrid& grid) {
  const auto samples = complete_kinematics(seg);
  return fit_dpyre(samples, PathGeometry(path), seg.source_meta.sample_rate, grid);
}

std::vector<AdjustmentBurst> detect_adjustments(std::span<const double> sw_rate, double sample_rate,
                                                double rate_threshold, double min_separation) {
  const double dt = 1.0 / sample_rate;
  struct Run {
    std::size_t first, last;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < sw_rate.size(); ++i) {
    if (std::abs(sw_rate[i]) <= rate_threshold) continue;
    if (!runs.empty() && runs.back().last + 1 == i) {
      runs.back().last = i;
    } else if (!runs.empty() && static_cast<double>(i - runs.back().last - 1) * dt < min_separation) {
      runs.back().last = i;
    } else {
      runs.push_back({i, i});
    }
  }
  std::vector<AdjustmentBurst> bursts;
  bursts.reserve(runs.size());
  for (const auto& r : runs) {
    AdjustmentBurst b;
    b.t_onset = static_cast<double>(r.first) * dt;
    b.duration = static_cast<double>(r.last - r.first + 1) * dt;
    for (std::size_t i = r.first; i <= r.last; ++i) b.amplitude += sw_rate[i] * dt;
    bursts.push_back(b);
  }
  return bursts;
}

double min_jerk_pulse(double tau) {
  if (tau <= 0.0 || tau >= 1.0) return 0.0;
  const double u = tau * (1.0 - tau);
  return 30.0 * u * u;
}

void add_min_jerk_pulse(std::vector<double>& rate, double sample_rate, double onset, double amplitude,
                        double duration) {
  const double dt = 1.0 / sample_rate;
  const auto first = static_cast<long>(std::ceil(onset / dt - 1e-9));
  const auto last = static_cast<long>(std::floor((onset + duration) / dt + 1e-9));
  for (long i = std::max(0L, first); i <= last && i < static_cast<long>(rate.size()); ++i) {
    rate[static_cast<std::size_t>(i)] += amplitude / duration * min_jerk_pulse((static_cast<double>(i) * dt - onset) / duration);
  }
}

double average_adjustment_magnitude(std::span<const AdjustmentBurst> bursts) {
  if (bursts.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& b : bursts) sum += std::abs(b.amplitude);
  return sum / static_cast<double>(bursts.size());
}

namespace {

/// Area of the unit minimum-jerk profile over [0, tau].
double min_jerk_area(double tau) { return tau * tau * tau * (10.0 - 15.0 * tau + 6.0 * tau * tau); }

struct OnsetEstimate {
  double onset;      // s from the first sample
  double amplitude;  // full pulse area
};

/// A minimum-jerk pulse of area A and width D first exceeds the threshold h at
/// tau with tau (1 - tau) = sqrt(h D / (30 |A|)). The detected area misses the
/// sub-threshold tails, so the full area is refined alongside.
OnsetEstimate back_date_onset(const AdjustmentBurst& b, double threshold, double duration) {
  double area = b.amplitude;
  double tau = 0.0;
  for (int iter = 0; iter < 4; ++iter) {
    const double c = threshold * duration / (30.0 * std::abs(area));
    const double disc = 1.0 - 4.0 * std::sqrt(c);
    tau = disc > 0.0 ? 0.5 * (1.0 - std::sqrt(disc)) : 0.5;
    const double kept = 1.0 - 2.0 * min_jerk_area(tau);
    if (kept <= 0.0) break;
    area = b.amplitude / kept;
  }
  return {b.t_onset - tau * duration, area};
}

double interpolate(const std::vector<double>& v, double pos) {
  if (pos < 0.0) return 0.0;
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= v.size()) return i < v.size() ? v[i] : 0.0;
  const double f = pos - static_cast<double>(i);
  return v[i] + f * (v[i + 1] - v[i]);
}

}  // namespace

ModelFit fit_intermittent_dpyre(std::span<const TrajectorySample> samples, const PathGeometry& path,
                                double sample_rate, const FitGrid& grid) {
  grid.validate();
  check_length(samples, sample_rate, grid);
  const auto delays = grid.delays();
  const auto previews = grid.previews();
  const auto durations = grid.burst_durations();
  const auto max_lag = static_cast<std::size_t>(std::lround(delays.back() * sample_rate));
  const Scoring sc = make_scoring(samples, max_lag, grid.min_speed);
  const auto& y = sc.target;

  std::vector<double> magnitudes;
  magnitudes.reserve(sc.index.size());
  for (auto i : sc.index) magnitudes.push_back(std::abs(y[i]));
  const double threshold = grid.threshold_fraction * percentile(magnitudes, grid.threshold_percentile);
  const auto bursts = detect_adjustments(y, sample_rate, threshold, grid.min_separation);
  if (bursts.empty() || !(threshold > 0.0)) throw FitError("unidentifiable: no steering adjustments detected");

  std::vector<std::vector<double>> errors;
  errors.reserve(previews.size());
  for (double tp : previews) errors.push_back(yaw_rate_error(samples, path, tp, grid.min_speed));

  ModelFit best;
  best.model = ModelKind::Idpyre;
  double best_ss = std::numeric_limits<double>::infinity();
  bool excited = false;
  std::vector<double> predicted(samples.size());
  std::vector<double> at_onset(bursts.size());
  std::vector<std::vector<OnsetEstimate>> onsets_by_duration;
  for (double duration : durations) {
    auto& onsets = onsets_by_duration.emplace_back();
    for (const auto& burst : bursts) onsets.push_back(back_date_onset(burst, threshold, duration));
  }
  for (std::size_t a = 0; a < delays.size(); ++a) {
    for (std::size_t b = 0; b < previews.size(); ++b) {
      for (std::size_t c = 0; c < durations.size(); ++c) {
        const double duration = durations[c];
        const auto& onsets = onsets_by_duration[c];
        double see = 0.0, sae = 0.0;
        for (std::size_t j = 0; j < bursts.size(); ++j) {
          at_onset[j] = interpolate(errors[b], (onsets[j].onset - delays[a]) * sample_rate);
          see += at_onset[j] * at_onset[j];
          sae += onsets[j].amplitude * at_onset[j];
        }
        if (see < 1e-12) continue;
        excited = true;
        const double gain = -sae / see;
        std::fill(predicted.begin(), predicted.end(), 0.0);
        for (std::size_t j = 0; j < bursts.size(); ++j) {
          add_min_jerk_pulse(predicted, sample_rate, onsets[j].onset, -gain * at_onset[j], duration);
        }
        double ss = 0.0;
        for (auto i : sc.index) {
          const double r = y[i] - predicted[i];
          ss += r * r;
        }
        if (ss < best_ss) {
          best_ss = ss;
          best.gain = gain;
          best.response_delay = delays[a];
          best.preview_time = previews[b];
          best.burst_duration = duration;
        }
      }
    }
  }
  if (!excited) throw FitError("unidentifiable: no yaw-rate error at adjustment onsets");
  best.n_adjustments = static_cast<int>(bursts.size());
  best.avg_adjustment_magnitude = average_adjustment_magnitude(bursts);
  finish_fit(best, best_ss, sc);
  return best;
}

ModelFit fit_intermittent_dpyre(const AttemptSegment& seg, const PathSpec& path, const FitGrid& grid) {
  const auto samples = complete_kinematics(seg);
  return fit_intermittent_dpyre(samples, PathGeometry(path), seg.source_meta.sample_rate, grid);
}

PathSpec fitting_path(const AttemptSegment& seg, const TaskLayout& layout, double min_speed) {
  if (layout.task != TaskKind::Clv) return layout.nominal_path;
  std::vector<double> radii;
  for (const auto& s : seg.samples) {
    if (s.speed > min_speed) radii.push_back(std::hypot(s.x, s.y));
  }
  if (radii.empty()) throw FitError("CLV attempt has no moving samples to size the circle");
  const TurnDirection dir = layout.direction.value_or(layout.nominal_path.direction);
  return PathSpec::circle({0.0, 0.0}, median(std::move(radii)), dir);
}

}  // namespace fidelity
