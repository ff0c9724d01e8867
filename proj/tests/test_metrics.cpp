#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fidelity/cone_contact.hpp"
#include "fidelity/metrics.hpp"
#include "fidelity/signal.hpp"

using namespace fidelity;

namespace {

constexpr double kRate = 100.0;

std::vector<double> sine_deg(double amp_deg, double freq, double seconds) {
  std::vector<double> v;
  for (int i = 0; i < static_cast<int>(seconds * kRate); ++i) {
    v.push_back(amp_deg * kDegree * std::sin(2 * kPi * freq * i / kRate));
  }
  return v;
}

AttemptSegment straight_run(TaskKind task, double speed, double seconds, double x0) {
  AttemptSegment seg;
  seg.source_meta.task = task;
  seg.source_meta.sample_rate = kRate;
  seg.aligned = true;
  for (int i = 0; i < static_cast<int>(seconds * kRate); ++i) {
    TrajectorySample s;
    s.t = i / kRate;
    s.x = x0 + speed * s.t;
    s.speed = speed;
    seg.samples.push_back(s);
  }
  return seg;
}

}  // namespace

TEST_CASE("SWRR of a 10 degree, 0.25 Hz sinusoid is 0.5 Hz at both gaps") {
  const auto swa = sine_deg(10, 0.25, 60);
  // 15 periods, two interior turning points each.
  CHECK(swrr(swa, 60, 1 * kDegree, kRate) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(swrr(swa, 60, 10 * kDegree, kRate) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("SWRR ignores swings smaller than the gap") {
  const auto swa = sine_deg(4, 0.25, 60);
  CHECK(swrr(swa, 60, 10 * kDegree, kRate) == 0.0);
  CHECK(swrr(swa, 60, 1 * kDegree, kRate) == doctest::Approx(0.5).epsilon(0.02));
  const std::vector<double> ramp{0, 1, 2, 3, 4, 5};
  CHECK(swrr(ramp, 1, 0.1, kRate) == 0.0);
}

TEST_CASE("SWRR never increases with the gap") {
  std::mt19937 rng(21);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> x(3000, 0.0);
    double state = 0.0;
    for (auto& v : x) v = state = 0.97 * state + 0.6 * kDegree * g(rng);
    double prev = 1e9;
    for (double gap = 0.25; gap <= 12.0; gap += 0.25) {
      const double r = swrr(x, 30, gap * kDegree, kRate);
      CHECK(r <= prev);
      prev = r;
    }
  }
}

TEST_CASE("LCT measures of a constant-speed lane shift") {
  AttemptSegment seg = straight_run(TaskKind::Lct, 12.5, 12, -40);
  for (auto& s : seg.samples) {
    // Cosine shift of 8 m between x = 20 and x = 40.
    const double f = std::clamp((s.x - 20.0) / 20.0, 0.0, 1.0);
    s.y = -4.0 * (1.0 - std::cos(kPi * f));
    s.lat_accel = -1.5 * std::sin(kPi * f);
    s.yaw_rate = 0.0;
    s.sw_rate = 0.0;
  }
  seg.cone_hits = 2;
  const auto layout = bundled_layout(TaskKind::Lct);
  const auto m = attempt_metrics(seg, layout);
  CHECK(m.at("cones_hit") == 2.0);
  CHECK(m.at("speed_var") == doctest::Approx(0.0));
  CHECK(m.at("max_lat_accel") == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(m.at("initial_speed") == doctest::Approx(12.5));
  CHECK(m.at("total_lat_travel") == doctest::Approx(8.0));
  CHECK(m.at("swrr_1") == 0.0);
  std::vector<std::string> names;
  for (const auto& e : m.entries) names.push_back(e.name);
  CHECK(names == metric_names(TaskKind::Lct));
}

TEST_CASE("geometric cone detection counts each cone once") {
  const auto layout = bundled_layout(TaskKind::Slx);
  AttemptSegment seg = straight_run(TaskKind::Slx, 12.5, 25, -30);
  // Driving along y = 0 runs over all eight slalom cones.
  CHECK(count_cone_hits(seg.samples, layout) == 8);
  for (auto& s : seg.samples) s.y = 10.0;
  CHECK(count_cone_hits(seg.samples, layout) == 0);
  // Body edge 0.95 m from the centre line plus the 0.15 m cone radius.
  CHECK(footprint_touches_cone({0, 1.09, 0}, {}, {1, 0, 0, 0.15}));
  CHECK_FALSE(footprint_touches_cone({0, 1.11, 0}, {}, {1, 0, 0, 0.15}));
  CHECK(footprint_touches_cone({2.5, 0, 0}, {}, {1, 0, 0, 0.15}));
  CHECK_FALSE(footprint_touches_cone({2.61, 0, 0}, {}, {1, 0, 0, 0.15}));
  // Corner distance for a rotated body.
  CHECK_FALSE(footprint_touches_cone({0, 0, kPi / 2}, {}, {1, 1.2, 0, 0.15}));
}

TEST_CASE("SLX peak amplitude of a sinusoidal slalom") {
  AttemptSegment seg = straight_run(TaskKind::Slx, 12.5, 26, -50);
  for (auto& s : seg.samples) {
    s.y = s.x > 0 && s.x < 225 ? -2.8 * std::sin(2 * kPi * s.x / 50.0) : 0.0;
  }
  const auto layout = bundled_layout(TaskKind::Slx);
  const auto m = timeseries_metrics(seg, layout);
  CHECK(m.at("peak_lat_amp") == doctest::Approx(2.8).epsilon(0.01));
  CHECK(m.at("peak_lat_amp_var") < 0.02);
  CHECK(m.at("avg_speed") == doctest::Approx(12.5));
}

TEST_CASE("CLV radius and speed of a steady circle") {
  AttemptSegment seg;
  seg.source_meta.task = TaskKind::Clv;
  seg.source_meta.sample_rate = kRate;
  seg.aligned = true;
  const double r = 55.0, v = 13.0;
  for (int i = 0; i < 6000; ++i) {
    const double t = i / kRate;
    const double speed = t < 5 ? v * t / 5 : (t > 50 ? std::max(0.0, v * (1 - (t - 50) / 5)) : v);
    TrajectorySample s;
    s.t = t;
    s.x = r * std::cos(-t * v / r);
    s.y = r * std::sin(-t * v / r);
    s.speed = speed;
    s.heading = wrap_angle(-t * v / r - kPi / 2);
    seg.samples.push_back(s);
  }
  const auto m = attempt_metrics(seg, bundled_layout(TaskKind::Clv));
  CHECK(m.at("avg_radius") == doctest::Approx(r));
  CHECK(m.at("radius_var") == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(m.at("avg_speed") > 0.9 * v);
  CHECK(m.at("avg_speed") <= v + 1e-9);
}
