#include "fidelity/scenario.hpp"

#include <cmath>
#include <deque>
#include <random>
#include <vector>

#include "fidelity/cone_contact.hpp"
#include "fidelity/drive_log.hpp"
#include "fidelity/errors.hpp"
#include "fidelity/random.hpp"
#include "fidelity/signal.hpp"

namespace fidelity {

namespace {

enum class Phase { Waiting, Driving, Braking, Stopped };

struct Pulse {
  double onset;
  double amplitude;
  double duration;
};

class SteeringController {
 public:
  SteeringController(const PathGeometry& path, const DriverProfile& driver, double log_rate)
      : tracker_(path),
        path_(&path),
        driver_(&driver),
        delay_(static_cast<std::size_t>(std::lround(driver.steering.response_delay * log_rate))) {}

  /// Steering-wheel rate command for the state observed at time t.
  double update(double t, const VehicleState& s, double min_speed, bool active) {
    const double speed = s.speed();
    const double s_near = tracker_.nearest({s.x, s.y});
    const double desired = desired_yaw_rate_from({s.x, s.y, s.heading}, preview_speed(speed, min_speed), *path_,
                                                 s_near, driver_->steering.preview_time);
    errors_.push_back(s.yaw_rate - desired);
    if (errors_.size() > delay_ + 1) errors_.pop_front();
    if (!active) return 0.0;
    const bool have_delayed = errors_.size() == delay_ + 1;
    const double delayed = have_delayed ? errors_.front() : 0.0;

    const auto& im = driver_->intermittent;
    if (!im.enabled) return -driver_->steering.gain * delayed;

    if (have_delayed && t >= next_onset_ && std::abs(delayed) > im.trigger) {
      pulses_.push_back({t, -im.gain * delayed, im.burst_duration});
      next_onset_ = t + im.burst_duration + im.refractory;
    }
    double rate = 0.0;
    for (const auto& p : pulses_) rate += p.amplitude / p.duration * min_jerk_pulse((t - p.onset) / p.duration);
    std::erase_if(pulses_, [t](const Pulse& p) { return t > p.onset + p.duration; });
    return rate;
  }

  void reset() {
    tracker_ = PathTracker(*path_);
    errors_.clear();
    pulses_.clear();
    next_onset_ = 0.0;
  }

 private:
  PathTracker tracker_;
  const PathGeometry* path_;
  const DriverProfile* driver_;
  std::size_t delay_;
  std::deque<double> errors_;
  std::vector<Pulse> pulses_;
  double next_onset_ = 0.0;
};

struct CircleTargets {
  double lap = 0.0;
  double v_max = 0.0;
  double brake = 0.0;
};

}  // namespace

DriverProfile sample_driver(std::uint64_t seed, const std::string& driver_id) {
  Rng rng(stream_seed(seed, {hash_text("driver"), hash_text(driver_id)}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DriverProfile d;
  d.steering.gain = 10.0 + 6.0 * unit(rng);
  d.steering.response_delay = std::round((0.10 + 0.10 * unit(rng)) * 100.0) / 100.0;
  d.steering.preview_time = 1.3 + 0.7 * unit(rng);
  d.speed.clv_speed_factor = 0.9 + 0.1 * unit(rng);
  return d;
}

DriveLog run_scenario(const TaskLayout& layout, const VehicleParams& params, const DriverProfile& driver,
                      std::uint64_t seed, const ScenarioConfig& cfg) {
  const FrictionGrid grid = generate_friction_grid(layout, stream_seed(seed, {hash_text("grid")}));
  return run_scenario(layout, grid, params, driver, seed, cfg);
}

DriveLog run_scenario(const TaskLayout& layout, const FrictionGrid& grid, const VehicleParams& params,
                      const DriverProfile& driver, std::uint64_t seed, const ScenarioConfig& cfg) {
  validate_layout(layout);
  params.validate();
  driver.steering.validate();
  if (cfg.attempts < 1) throw ValidationError("scenario needs at least one attempt");
  if (!(cfg.log_rate > 0.0)) throw ValidationError("log rate must be positive");
  const auto substeps = static_cast<int>(std::lround(1.0 / (cfg.log_rate * cfg.dt)));
  if (substeps < 1 || std::abs(substeps * cfg.dt * cfg.log_rate - 1.0) > 1e-9) {
    throw ValidationError("integration step must divide the logging period");
  }
  const double period = 1.0 / cfg.log_rate;
  constexpr double kMinSpeed = 2.0;
  constexpr double kSteerBelow = 0.5;  // no steering input at standstill

  const PathGeometry path(layout.nominal_path);
  const Pose2 start = layout_start_pose(layout);
  const bool circle = layout.task == TaskKind::Clv;
  CircleTargets ct;
  if (circle) {
    const double mu = layout.default_surface.mu_mean;
    const double r = layout.nominal_path.radius;
    ct.lap = 2.0 * kPi * r;
    ct.v_max = driver.speed.clv_speed_factor * std::sqrt(driver.speed.clv_grip_fraction * mu * kGravity * r);
    ct.brake = driver.speed.clv_brake_fraction * mu * kGravity;
  }
  const double brake_x = final_gate_x(layout) + 30.0;

  DriveLog log;
  log.meta.driver_id = cfg.driver_id;
  log.meta.environment = cfg.environment;
  log.meta.task = layout.task;
  log.meta.sample_rate = cfg.log_rate;
  log.meta.extra["sim_seed"] = std::to_string(seed);
  log.meta.extra["sim_gain"] = format_number(driver.intermittent.enabled ? driver.intermittent.gain : driver.steering.gain);
  log.meta.extra["sim_delay"] = format_number(driver.steering.response_delay);
  log.meta.extra["sim_preview"] = format_number(driver.steering.preview_time);
  log.meta.extra["sim_controller"] = driver.intermittent.enabled ? "IDPYRE" : "DPYRE";

  SteeringController steering(path, driver, cfg.log_rate);
  std::vector<double> hit_times;
  std::size_t tick = 0;

  for (int attempt = 1; attempt <= cfg.attempts; ++attempt) {
    Rng noise_rng(stream_seed(seed, {hash_text("attempt"), hash_text(cfg.driver_id), static_cast<std::uint64_t>(attempt)}));
    std::normal_distribution<double> standard(0.0, 1.0);
    const double jitter = 1.0 + cfg.speed_jitter * standard(noise_rng);
    steering.reset();

    VehicleState state;
    state.x = start.x;
    state.y = start.y;
    state.heading = start.heading;
    Phase phase = Phase::Waiting;
    const double t_attempt = static_cast<double>(tick) * period;
    double t_phase = t_attempt;
    double travelled = 0.0;
    std::optional<double> s_start;
    PathTracker progress(path);
    std::vector<bool> cone_down(layout.cones.size(), false);

    while (true) {
      const double t = static_cast<double>(tick) * period;
      if (t - t_attempt > cfg.max_attempt_time) {
        throw SimulationError("attempt " + std::to_string(attempt) + " did not finish within " +
                              format_number(cfg.max_attempt_time) + " s");
      }
      if (std::abs(state.x) > cfg.divergence_half_width || std::abs(state.y) > cfg.divergence_half_width) {
        throw SimulationError("controller divergence: vehicle left the " +
                              format_number(2.0 * cfg.divergence_half_width) + " m box at t = " + format_number(t) + " s");
      }

      // Phase transitions.
      if (phase == Phase::Waiting && t - t_phase >= cfg.idle_time) {
        phase = Phase::Driving;
      } else if (phase == Phase::Driving) {
        const bool done = circle ? travelled >= 3.0 * ct.lap - state.u * state.u / (2.0 * ct.brake) : state.x >= brake_x;
        if (done) phase = Phase::Braking;
      } else if (phase == Phase::Braking && state.u < 0.05) {
        state.u = 0.0;
        state.v = 0.0;
        state.yaw_rate = 0.0;
        phase = Phase::Stopped;
        t_phase = t;
      }
      const bool finished = phase == Phase::Stopped && t - t_phase >= cfg.idle_time;

      // Controls at this tick, held over the integration substeps.
      VehicleControls controls;
      const bool moving = phase == Phase::Driving || phase == Phase::Braking;
      controls.sw_rate = steering.update(t, state, kMinSpeed, moving && state.u > kSteerBelow);
      if (moving && state.u > kSteerBelow) controls.sw_rate += cfg.steering_noise_sd * standard(noise_rng);
      if (phase == Phase::Driving) {
        double target = driver.speed.target_speed.value_or(layout.nominal_speed) * jitter;
        if (circle) {
          const double ramp = std::sqrt(std::clamp(travelled / ct.lap, 0.0, 1.0));
          target = std::max(kMinSpeed, ct.v_max * jitter * ramp);
        }
        controls.accel = std::clamp(driver.speed.gain * (target - state.u), -driver.speed.max_brake, driver.speed.max_accel);
      } else if (phase == Phase::Braking) {
        controls.accel = circle ? -ct.brake : -driver.speed.max_brake;
      }

      // Log.
      const VehicleOutputs out = vehicle_outputs(state, controls, params, grid);
      TrajectorySample sample;
      sample.t = t;
      sample.x = state.x;
      sample.y = state.y;
      sample.heading = wrap_angle(state.heading);
      sample.speed = state.speed();
      sample.yaw_rate = state.yaw_rate;
      sample.lat_accel = out.lat_accel;
      sample.swa = state.swa;
      log.samples.push_back(sample);

      for (std::size_t i : cones_touched({state.x, state.y, state.heading}, params.footprint, layout)) {
        if (!cone_down[i]) {
          cone_down[i] = true;
          hit_times.push_back(t);
        }
      }
      ++tick;
      if (finished) break;

      if (moving) {
        for (int k = 0; k < substeps; ++k) state = step_vehicle(state, controls, params, grid, cfg.dt);
        const double s_now = progress.nearest({state.x, state.y});
        if (!s_start) s_start = s_now;
        travelled = circle ? s_now - *s_start : travelled;
      }
    }
  }
  log.meta.extra[std::string(kConeHitEventsKey)] = encode_event_times(hit_times);
  return log;
}

}  // namespace fidelity
