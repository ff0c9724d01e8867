#pragma once

#include "fidelity/cone_contact.hpp"
#include "fidelity/friction_grid.hpp"

namespace fidelity {

struct VehicleParams {
  double mass = 1800.0;                 // kg
  double yaw_inertia = 3900.0;          // kg m^2
  double wheelbase = 2.96;              // m
  double cog_to_front = 1.40;           // m
  double cornering_front = 80000.0;     // N/rad per axle
  double cornering_rear = 80000.0;      // N/rad per axle
  double steering_ratio = 16.0;         // steering-wheel angle per road-wheel angle
  Footprint footprint;                  // 4.9 m x 1.9 m
  double max_steering_angle = 7.85;     // rad at the steering wheel

  double cog_to_rear() const { return wheelbase - cog_to_front; }
  void validate() const;
};

/// Planar single-track state. Velocities are in the body frame.
struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double u = 0.0;         // longitudinal speed, m/s (never negative)
  double v = 0.0;         // lateral speed, m/s
  double yaw_rate = 0.0;  // rad/s
  double swa = 0.0;       // steering-wheel angle, rad

  double speed() const;
};

struct VehicleControls {
  double sw_rate = 0.0;  // rad/s
  double accel = 0.0;    // m/s^2 longitudinal demand
};

/// Quantities evaluated at a state, used for logging.
struct VehicleOutputs {
  double lat_accel = 0.0;  // m/s^2 at the centre of gravity
  double mu_front = 0.0;
  double mu_rear = 0.0;
};

/// One fixed-step RK4 step (dt in (0, 0.01]). Per-axle lateral force is
/// cornering stiffness times slip angle, limited by the friction circle left
/// over by the longitudinal force; friction is sampled under each axle.
/// Throws SimulationError on a non-finite state.
VehicleState step_vehicle(const VehicleState& state, const VehicleControls& controls, const VehicleParams& params,
                          const FrictionGrid& grid, double dt);

VehicleOutputs vehicle_outputs(const VehicleState& state, const VehicleControls& controls, const VehicleParams& params,
                               const FrictionGrid& grid);

}  // namespace fidelity
