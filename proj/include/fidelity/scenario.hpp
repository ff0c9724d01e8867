#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fidelity/driver_model.hpp"
#include "fidelity/friction_grid.hpp"
#include "fidelity/layout.hpp"
#include "fidelity/vehicle.hpp"

namespace fidelity {

struct SpeedControl {
  std::optional<double> target_speed;  // m/s, defaults to the layout's nominal speed
  double gain = 0.8;                   // 1/s
  double max_accel = 2.5;              // m/s^2
  double max_brake = 4.0;              // m/s^2
  double clv_grip_fraction = 0.9;      // circle speed target sqrt(fraction * mu * g * R)
  double clv_speed_factor = 1.0;       // driver's share of that target
  double clv_brake_fraction = 0.25;    // braking deceleration as a fraction of mu * g
};

/// Discrete steering adjustments: when idle and the delayed yaw-rate error
/// exceeds `trigger`, a minimum-jerk rate pulse of area -gain * error starts.
struct IntermittentControl {
  bool enabled = false;
  double gain = 3.0;
  double burst_duration = 0.4;  // s
  double trigger = 0.01;        // rad/s
  double refractory = 0.2;      // s between the end of one adjustment and the next onset
};

struct DriverProfile {
  DpyreConfig steering;
  IntermittentControl intermittent;
  SpeedControl speed;
};

struct ScenarioConfig {
  std::string driver_id = "sim";
  Environment environment = Environment::Std;
  int attempts = 1;
  double idle_time = 3.0;           // s stationary before and after each attempt
  double steering_noise_sd = 0.0;   // rad/s, white noise added to the steering-rate command
  double speed_jitter = 0.0;        // relative SD of the per-attempt speed target
  double max_attempt_time = 300.0;  // s
  double dt = 0.002;                // s integration step
  double log_rate = 100.0;          // Hz
  double divergence_half_width = 500.0;  // m, the run fails outside this box
};

/// Closed-loop runs of the steering and speed controllers through the
/// layout, separated by stationary pauses. Cone contacts are stored under the
/// cone-hit metadata key. Throws SimulationError on divergence or timeout.
DriveLog run_scenario(const TaskLayout& layout, const VehicleParams& params, const DriverProfile& driver,
                      std::uint64_t seed, const ScenarioConfig& cfg = {});

/// Same, on a supplied friction grid instead of one generated from the layout.
DriveLog run_scenario(const TaskLayout& layout, const FrictionGrid& grid, const VehicleParams& params,
                      const DriverProfile& driver, std::uint64_t seed, const ScenarioConfig& cfg = {});

/// Driver parameters drawn from the driver's own stream (independent of the environment):
/// gain U[10, 16], delay U[0.10, 0.20] s, preview U[1.3, 2.0] s, circle speed share U[0.9, 1.0].
DriverProfile sample_driver(std::uint64_t seed, const std::string& driver_id);

}  // namespace fidelity
