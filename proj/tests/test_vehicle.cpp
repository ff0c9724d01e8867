#include <doctest.h>

#include <cmath>

#include "fidelity/errors.hpp"
#include "fidelity/vehicle.hpp"

using namespace fidelity;

namespace {

FrictionGrid flat(double mu) { return uniform_friction_grid({-500, -500, 500, 500}, mu, 10.0); }

/// Steady state after holding a steering-wheel angle at constant speed.
VehicleState hold(double swa, double speed, double mu, double seconds) {
  const VehicleParams p;
  const auto grid = flat(mu);
  VehicleState s;
  s.u = speed;
  s.swa = swa;
  for (int i = 0; i < static_cast<int>(seconds / 0.002); ++i) s = step_vehicle(s, {}, p, grid, 0.002);
  return s;
}

}  // namespace

TEST_CASE("straight line at constant speed") {
  const VehicleParams p;
  const auto grid = flat(0.8);
  VehicleState s;
  s.u = 15.0;
  s.heading = 0.3;
  for (int i = 0; i < 1000; ++i) s = step_vehicle(s, {}, p, grid, 0.002);
  CHECK(s.u == doctest::Approx(15.0).epsilon(1e-9));
  CHECK(std::abs(s.v) < 1e-9);
  CHECK(std::abs(s.yaw_rate) < 1e-9);
  CHECK(s.heading == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(s.x == doctest::Approx(30.0 * std::cos(0.3)).epsilon(1e-9));
  CHECK(s.y == doctest::Approx(30.0 * std::sin(0.3)).epsilon(1e-9));
}

TEST_CASE("low-speed yaw rate matches kinematic steering") {
  const VehicleParams p;
  for (double swa : {0.5, -1.0, 2.0}) {
    const auto s = hold(swa, 3.0, 1.0, 5.0);
    const double delta = swa / p.steering_ratio;
    CHECK(s.yaw_rate == doctest::Approx(3.0 * std::tan(delta) / p.wheelbase).epsilon(0.02));
  }
}

TEST_CASE("lateral acceleration respects the friction bound") {
  const VehicleParams p;
  const auto grid = flat(0.2);
  VehicleState s;
  s.u = 20.0;
  s.swa = 3.0;
  double peak = 0.0;
  for (int i = 0; i < 3000; ++i) {
    s = step_vehicle(s, {}, p, grid, 0.002);
    peak = std::max(peak, std::abs(vehicle_outputs(s, {}, p, grid).lat_accel));
  }
  CHECK(peak <= 0.2 * 9.81 * 1.01);
}

TEST_CASE("more grip never reduces steady lateral acceleration") {
  const VehicleParams p;
  double last = 0.0;
  for (double mu : {0.1, 0.2, 0.4, 0.8, 1.2}) {
    const auto s = hold(1.5, 18.0, mu, 6.0);
    const double a = std::abs(vehicle_outputs(s, {}, p, flat(mu)).lat_accel);
    CHECK(a >= last - 1e-6);
    last = a;
  }
}

TEST_CASE("steering clamps at the column stop and brakes stop at zero") {
  const VehicleParams p;
  const auto grid = flat(0.8);
  VehicleState s;
  s.u = 1.0;
  for (int i = 0; i < 2000; ++i) s = step_vehicle(s, {10.0, -4.0}, p, grid, 0.002);
  CHECK(s.swa == doctest::Approx(p.max_steering_angle));
  CHECK(s.u == 0.0);
  CHECK_THROWS_AS(step_vehicle(s, {}, p, grid, 0.05), ValidationError);
}
