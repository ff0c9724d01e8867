#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fidelity/cueing.hpp"
#include "fidelity/errors.hpp"

using namespace fidelity;

namespace {

std::vector<BodyMotion> series(double seconds, double ay) {
  std::vector<BodyMotion> out;
  for (int i = 0; i < static_cast<int>(seconds * 100); ++i) {
    BodyMotion m;
    m.t = i / 100.0;
    m.ay = i >= 100 ? ay : 0.0;
    out.push_back(m);
  }
  return out;
}

}  // namespace

TEST_CASE("zero input keeps the platform neutral") {
  for (const auto& p : motion_cueing(series(30, 0.0))) {
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);
    CHECK(p.z == 0.0);
    CHECK(p.roll == 0.0);
    CHECK(p.pitch == 0.0);
    CHECK(p.yaw == 0.0);
    CHECK(p.limit_flags == 0u);
  }
}

TEST_CASE("lateral step stays inside the table and washes out") {
  const CueingParams params;
  const auto poses = motion_cueing(series(40, 2.0), params);
  double peak = 0.0;
  std::size_t peak_index = 0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    CHECK(std::abs(poses[i].y) <= params.limit_xy);
    if (std::abs(poses[i].y) > peak) {
      peak = std::abs(poses[i].y);
      peak_index = i;
    }
  }
  REQUIRE(peak > 0.0);
  // Third-order washout step response: scale * a * t^2 e^-t / 2, peak at t = 2 s.
  CHECK(peak == doctest::Approx(0.5 * 2.0 * 2.0 * std::exp(-2.0)).epsilon(0.01));
  const double step_time = poses[100].t;
  for (const auto& p : poses) {
    if (p.t >= step_time + 10.0) CHECK(std::abs(p.y) < 0.05 * peak);
  }
  CHECK(peak_index > 100);
}

TEST_CASE("tilt coordination respects its rate limit") {
  const CueingParams params;
  const auto poses = motion_cueing(series(60, 4.0), params);
  double max_rate = 0.0;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    max_rate = std::max(max_rate, std::abs(poses[i].roll - poses[i - 1].roll) / (poses[i].t - poses[i - 1].t));
  }
  CHECK(max_rate <= params.tilt_rate_limit * (1.0 + 1e-9));
  CHECK(max_rate > 0.5 * params.tilt_rate_limit);
  // Sustained lateral force tilts the platform the opposite way.
  CHECK(poses.back().roll < 0.0);
  CHECK(std::abs(poses.back().roll) <= params.limit_angle);
}

TEST_CASE("oversized input is clamped and flagged") {
  const auto poses = motion_cueing(series(20, 60.0));
  const bool flagged = std::any_of(poses.begin(), poses.end(), [](const PlatformPose& p) { return p.limit_flags & kLimitY; });
  CHECK(flagged);
  for (const auto& p : poses) CHECK(std::abs(p.y) <= 2.5);
}

TEST_CASE("parameters and sampling are validated") {
  CueingParams bad;
  bad.scale = 1.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  auto s = series(2, 0.0);
  s[5].t = s[4].t;
  CHECK_THROWS_AS(motion_cueing(s), ValidationError);
  const auto text = write_cueing(motion_cueing(series(1, 0.0)));
  CHECK(text.rfind("t,x,y,z,roll,pitch,yaw,limit_flags\n", 0) == 0);
}
