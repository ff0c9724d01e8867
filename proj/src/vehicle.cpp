#include "fidelity/vehicle.hpp"

#include <algorithm>
#include <cmath>

#include "fidelity/errors.hpp"
#include "fidelity/signal.hpp"

namespace fidelity {

void VehicleParams::validate() const {
  const bool positive = mass > 0 && yaw_inertia > 0 && wheelbase > 0 && cog_to_front > 0 && cornering_front > 0 &&
                        cornering_rear > 0 && steering_ratio > 0 && footprint.length > 0 && footprint.width > 0 &&
                        max_steering_angle > 0;
  if (!positive) throw ValidationError("vehicle parameters must be positive");
  if (!(cog_to_front < wheelbase)) throw ValidationError("centre of gravity must lie within the wheelbase");
}

double VehicleState::speed() const { return std::hypot(u, v); }

namespace {

// Below this speed the slip-angle model is replaced by rolling kinematics.
constexpr double kKinematicBelow = 0.5;
constexpr double kDynamicAbove = 1.5;
constexpr double kKinematicRelax = 0.05;  // s

struct Derivative {
  double x, y, heading, u, v, yaw_rate, swa;
};

struct AxleForces {
  double front = 0.0;  // lateral, N
  double rear = 0.0;
  double longitudinal_accel = 0.0;
  double mu_front = 0.0;
  double mu_rear = 0.0;
};

AxleForces axle_forces(const VehicleState& s, const VehicleControls& c, const VehicleParams& p, const FrictionGrid& g) {
  const double a = p.cog_to_front, b = p.cog_to_rear();
  const double ch = std::cos(s.heading), sh = std::sin(s.heading);
  AxleForces f;
  f.mu_front = friction_at(g, s.x + a * ch, s.y + a * sh);
  f.mu_rear = friction_at(g, s.x - b * ch, s.y - b * sh);

  const double fz_front = p.mass * kGravity * b / p.wheelbase;
  const double fz_rear = p.mass * kGravity * a / p.wheelbase;
  // Longitudinal demand is limited by the total available grip and split by static load.
  const double grip = (f.mu_front * fz_front + f.mu_rear * fz_rear) / p.mass;
  f.longitudinal_accel = std::clamp(c.accel, -grip, grip);
  const double fx_front = p.mass * f.longitudinal_accel * b / p.wheelbase;
  const double fx_rear = p.mass * f.longitudinal_accel * a / p.wheelbase;
  const double lim_front = std::sqrt(std::max(0.0, std::pow(f.mu_front * fz_front, 2) - fx_front * fx_front));
  const double lim_rear = std::sqrt(std::max(0.0, std::pow(f.mu_rear * fz_rear, 2) - fx_rear * fx_rear));

  const double delta = s.swa / p.steering_ratio;
  const double ue = std::max(s.u, kKinematicBelow);
  const double alpha_front = delta - std::atan2(s.v + a * s.yaw_rate, ue);
  const double alpha_rear = -std::atan2(s.v - b * s.yaw_rate, ue);
  f.front = std::clamp(p.cornering_front * alpha_front, -lim_front, lim_front);
  f.rear = std::clamp(p.cornering_rear * alpha_rear, -lim_rear, lim_rear);
  return f;
}

Derivative derivative(const VehicleState& s, const VehicleControls& c, const VehicleParams& p, const FrictionGrid& g) {
  const double a = p.cog_to_front, b = p.cog_to_rear();
  const double delta = s.swa / p.steering_ratio;
  const AxleForces f = axle_forces(s, c, p, g);
  const double ch = std::cos(s.heading), sh = std::sin(s.heading);

  Derivative d{};
  d.x = s.u * ch - s.v * sh;
  d.y = s.u * sh + s.v * ch;
  d.heading = s.yaw_rate;
  d.swa = c.sw_rate;

  const double du_dyn = f.longitudinal_accel - f.front * std::sin(delta) / p.mass + s.v * s.yaw_rate;
  const double dv_dyn = (f.front * std::cos(delta) + f.rear) / p.mass - s.u * s.yaw_rate;
  const double dr_dyn = (a * f.front * std::cos(delta) - b * f.rear) / p.yaw_inertia;

  const double w = std::clamp((s.u - kKinematicBelow) / (kDynamicAbove - kKinematicBelow), 0.0, 1.0);
  if (w >= 1.0) {
    d.u = du_dyn;
    d.v = dv_dyn;
    d.yaw_rate = dr_dyn;
    return d;
  }
  // Rolling without slip: yaw rate and lateral speed relax toward their kinematic values.
  const double r_kin = s.u * std::tan(delta) / p.wheelbase;
  const double v_kin = b * r_kin;
  d.u = w * du_dyn + (1.0 - w) * f.longitudinal_accel;
  d.v = w * dv_dyn + (1.0 - w) * (v_kin - s.v) / kKinematicRelax;
  d.yaw_rate = w * dr_dyn + (1.0 - w) * (r_kin - s.yaw_rate) / kKinematicRelax;
  return d;
}

VehicleState advance(const VehicleState& s, const Derivative& d, double h) {
  VehicleState n = s;
  n.x += h * d.x;
  n.y += h * d.y;
  n.heading += h * d.heading;
  n.u += h * d.u;
  n.v += h * d.v;
  n.yaw_rate += h * d.yaw_rate;
  n.swa += h * d.swa;
  return n;
}

}  // namespace

VehicleState step_vehicle(const VehicleState& state, const VehicleControls& controls, const VehicleParams& params,
                          const FrictionGrid& grid, double dt) {
  if (!(dt > 0.0 && dt <= 0.01)) throw ValidationError("integration step must lie in (0, 0.01] s");
  VehicleControls c = controls;
  // The steering column stops at its limit.
  if ((state.swa >= params.max_steering_angle && c.sw_rate > 0.0) ||
      (state.swa <= -params.max_steering_angle && c.sw_rate < 0.0)) {
    c.sw_rate = 0.0;
  }
  // A stopped vehicle does not roll backwards under braking.
  if (state.u <= 0.0 && c.accel < 0.0) c.accel = 0.0;

  const Derivative k1 = derivative(state, c, params, grid);
  const Derivative k2 = derivative(advance(state, k1, 0.5 * dt), c, params, grid);
  const Derivative k3 = derivative(advance(state, k2, 0.5 * dt), c, params, grid);
  const Derivative k4 = derivative(advance(state, k3, dt), c, params, grid);
  Derivative sum{};
  sum.x = (k1.x + 2 * k2.x + 2 * k3.x + k4.x) / 6.0;
  sum.y = (k1.y + 2 * k2.y + 2 * k3.y + k4.y) / 6.0;
  sum.heading = (k1.heading + 2 * k2.heading + 2 * k3.heading + k4.heading) / 6.0;
  sum.u = (k1.u + 2 * k2.u + 2 * k3.u + k4.u) / 6.0;
  sum.v = (k1.v + 2 * k2.v + 2 * k3.v + k4.v) / 6.0;
  sum.yaw_rate = (k1.yaw_rate + 2 * k2.yaw_rate + 2 * k3.yaw_rate + k4.yaw_rate) / 6.0;
  sum.swa = (k1.swa + 2 * k2.swa + 2 * k3.swa + k4.swa) / 6.0;
  VehicleState next = advance(state, sum, dt);
  next.u = std::max(0.0, next.u);
  next.swa = std::clamp(next.swa, -params.max_steering_angle, params.max_steering_angle);

  for (double v : {next.x, next.y, next.heading, next.u, next.v, next.yaw_rate, next.swa}) {
    if (!std::isfinite(v)) throw SimulationError("vehicle state became non-finite");
  }
  return next;
}

VehicleOutputs vehicle_outputs(const VehicleState& state, const VehicleControls& controls, const VehicleParams& params,
                               const FrictionGrid& grid) {
  const AxleForces f = axle_forces(state, controls, params, grid);
  const double delta = state.swa / params.steering_ratio;
  VehicleOutputs out;
  out.mu_front = f.mu_front;
  out.mu_rear = f.mu_rear;
  const double w = std::clamp((state.u - kKinematicBelow) / (kDynamicAbove - kKinematicBelow), 0.0, 1.0);
  const double dynamic = (f.front * std::cos(delta) + f.rear) / params.mass;
  out.lat_accel = w * dynamic + (1.0 - w) * state.u * state.yaw_rate;
  return out;
}

}  // namespace fidelity
