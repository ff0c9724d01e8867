#include <doctest.h>

#include <cmath>

#include "fidelity/errors.hpp"
#include "fidelity/kinematics.hpp"
#include "fidelity/signal.hpp"

using namespace fidelity;

namespace {

DriveLog turning_log(double rate, double yaw, double speed, double swa_rate, int n) {
  DriveLog log;
  log.meta.sample_rate = rate;
  for (int i = 0; i < n; ++i) {
    TrajectorySample s;
    s.t = i / rate;
    s.heading = wrap_angle(yaw * s.t);
    s.speed = speed;
    s.swa = swa_rate * s.t;
    log.samples.push_back(s);
  }
  return log;
}

}  // namespace

TEST_CASE("derived yaw rate, lateral acceleration and steering rate of a steady turn") {
  // Heading grows through several wraps; the derivative must not see them.
  const DriveLog log = derive_kinematics(turning_log(100, 0.5, 10, -0.2, 3000));
  for (const auto& s : log.samples) {
    REQUIRE(s.yaw_rate);
    CHECK(*s.yaw_rate == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(*s.lat_accel == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(*s.sw_rate == doctest::Approx(-0.2).epsilon(1e-9));
  }
}

TEST_CASE("present values are never overwritten") {
  DriveLog log = turning_log(100, 0.5, 10, 0.0, 50);
  log.samples[10].yaw_rate = 9.0;
  log.samples[10].lat_accel = -1.0;
  const DriveLog out = derive_kinematics(log);
  CHECK(*out.samples[10].yaw_rate == 9.0);
  CHECK(*out.samples[10].lat_accel == -1.0);
  CHECK(*out.samples[11].yaw_rate == doctest::Approx(0.5));
}

TEST_CASE("non-uniform logs are rejected by derivation and resampled onto 100 Hz") {
  DriveLog log;
  log.meta.sample_rate = 50;
  for (double t : {0.0, 0.02, 0.05, 0.06, 0.1}) {
    TrajectorySample s;
    s.t = t;
    s.x = 2.0 * t;
    s.heading = t < 0.05 ? 3.1 : -3.1;
    s.swa = 1.0 - t;
    s.yaw_rate = t;
    log.samples.push_back(s);
  }
  CHECK_FALSE(is_uniform(log));
  CHECK_THROWS_AS(derive_kinematics(log), ValidationError);
  const DriveLog r = resample_uniform(log, 100);
  REQUIRE(r.samples.size() == 11);
  CHECK(is_uniform(r));
  CHECK(r.samples[3].x == doctest::Approx(0.06));
  CHECK(*r.samples[3].yaw_rate == doctest::Approx(0.03));
  // Between 3.1 and -3.1 the short way passes through pi.
  CHECK(std::abs(std::cos(r.samples[4].heading) + 1.0) < 1e-3);
}

TEST_CASE("optional columns missing on one side stay missing") {
  DriveLog log;
  log.meta.sample_rate = 10;
  for (int i = 0; i < 3; ++i) {
    TrajectorySample s;
    s.t = 0.1 * i;
    if (i != 1) s.lat_accel = 1.0;
    log.samples.push_back(s);
  }
  const DriveLog r = resample_uniform(log, 20);
  CHECK(r.samples[0].lat_accel.has_value());
  CHECK_FALSE(r.samples[1].lat_accel.has_value());
  CHECK_FALSE(r.samples[2].lat_accel.has_value());
}
