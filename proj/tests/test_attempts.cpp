#include <doctest.h>

#include <cmath>
#include <random>

#include "fidelity/attempts.hpp"
#include "fidelity/drive_log.hpp"
#include "fidelity/errors.hpp"
#include "fidelity/signal.hpp"

using namespace fidelity;

namespace {

constexpr double kRate = 100.0;

DriveLog speed_profile_log(TaskKind task, const std::vector<std::pair<double, double>>& knots) {
  // Piecewise-linear speed through (time, speed) knots, straight along +X.
  DriveLog log;
  log.meta.task = task;
  log.meta.sample_rate = kRate;
  log.meta.driver_id = "d";
  double x = 0.0;
  const double t_end = knots.back().first;
  for (int i = 0; i * 0.01 <= t_end + 1e-9; ++i) {
    const double t = i * 0.01;
    std::size_t k = 0;
    while (k + 2 < knots.size() && knots[k + 1].first <= t) ++k;
    const auto [t0, v0] = knots[k];
    const auto [t1, v1] = knots[k + 1];
    const double v = v0 + (v1 - v0) * std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    TrajectorySample s;
    s.t = t;
    s.x = x;
    s.speed = v;
    x += v * 0.01;
    log.samples.push_back(s);
  }
  return log;
}

/// World frame: origin (300, -20), rotated by 0.7 rad.
TrajectorySample to_world(double lx, double ly, double lh, double t, double speed) {
  const double th = 0.7, c = std::cos(th), s = std::sin(th);
  TrajectorySample p;
  p.t = t;
  p.x = 300.0 + c * lx - s * ly;
  p.y = -20.0 + s * lx + c * ly;
  p.heading = wrap_angle(lh + th);
  p.speed = speed;
  return p;
}

}  // namespace

TEST_CASE("two drives separated by a stop become two padded attempts") {
  const auto log = speed_profile_log(TaskKind::Slx, {{0, 0}, {3, 0}, {5, 10}, {15, 10}, {17, 0}, {25, 0}, {27, 8},
                                                     {35, 8}, {37, 0}, {40, 0}});
  const auto segs = segment_attempts(log, bundled_layout(TaskKind::Slx));
  REQUIRE(segs.size() == 2);
  // 10 m/s ramp over 2 s crosses 2 m/s at t = 3.4 and drops below 0.5 m/s at 16.9.
  CHECK(std::abs(segs[0].samples.front().t - 2.4) <= 0.0101);
  CHECK(std::abs(segs[0].samples.back().t - 17.9) <= 0.0101);
  CHECK(segs[1].attempt_index == 2);
  CHECK_FALSE(segs[0].cone_hits.has_value());
}

TEST_CASE("overlapping padding merges attempts and short ones are dropped") {
  const auto log = speed_profile_log(TaskKind::Slx, {{0, 0}, {1, 5}, {8, 5}, {8.2, 0}, {9.0, 0}, {9.2, 5}, {15, 5},
                                                     {15.2, 0}, {20, 0}, {20.2, 3}, {21, 3}, {21.2, 0}, {25, 0}});
  const auto segs = segment_attempts(log, bundled_layout(TaskKind::Slx));
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].samples.back().t > 15.0);
  CHECK(segs[0].samples.back().t < 17.0);
}

TEST_CASE("cone hits are attributed to the attempt containing them") {
  auto log = speed_profile_log(TaskKind::Slx, {{0, 0}, {3, 0}, {5, 10}, {15, 10}, {17, 0}, {25, 0}, {27, 8},
                                               {35, 8}, {37, 0}, {40, 0}});
  log.meta.extra[std::string(kConeHitEventsKey)] = "6;7.5;30";
  const auto segs = segment_attempts(log, bundled_layout(TaskKind::Slx));
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].cone_hits == 2);
  CHECK(segs[1].cone_hits == 1);
  CHECK(segs[0].source_meta.extra.count(std::string(kConeHitEventsKey)) == 0);
}

TEST_CASE("task mismatch is a validation error") {
  const auto log = speed_profile_log(TaskKind::Lct, {{0, 0}, {10, 10}});
  CHECK_THROWS_AS(segment_attempts(log, bundled_layout(TaskKind::Slx)), ValidationError);
}

TEST_CASE("LCT anchor is the first sample 1 m right of the initial line") {
  AttemptSegment seg;
  seg.source_meta.task = TaskKind::Lct;
  seg.source_meta.sample_rate = kRate;
  for (int i = 0; i <= 600; ++i) {
    const double t = i * 0.01, lx = 12.5 * t;
    const double ly = t < 2.0 ? 0.0 : -0.5 * (t - 2.0) * (t - 2.0);  // right turn after 2 s
    seg.samples.push_back(to_world(lx, ly, 0.0, t, 12.5));
  }
  const TaskLayout layout = bundled_layout(TaskKind::Lct);
  const auto anchor = locate_anchor(seg, layout, 1);
  // -0.5 (t - 2)^2 < -1 first at t = 2 + sqrt(2) rounded up to the sample grid.
  const double t_expect = std::ceil((2.0 + std::sqrt(2.0)) * 100.0) / 100.0;
  CHECK(anchor.t_anchor == doctest::Approx(t_expect));
  CHECK(anchor.heading == doctest::Approx(0.7));
  const auto aligned = to_task_frame(seg, anchor, layout);
  const auto idx = static_cast<std::size_t>(std::lround(t_expect * 100));
  CHECK(aligned.samples[idx].x == doctest::Approx(layout.reference_pose.x));
  CHECK(aligned.samples[idx].y == doctest::Approx(layout.reference_pose.y));
  CHECK(aligned.samples[0].heading == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(aligned.aligned);
}

TEST_CASE("LCT with no rightward excursion names the failed rule") {
  AttemptSegment seg;
  seg.source_meta.task = TaskKind::Lct;
  for (int i = 0; i < 500; ++i) seg.samples.push_back(to_world(0.1 * i, 0.001 * i, 0, 0.01 * i, 10));
  try {
    locate_anchor(seg, bundled_layout(TaskKind::Lct), 1);
    FAIL("expected an extraction error");
  } catch (const ExtractionError& e) {
    CHECK(std::string(e.what()).find("LATERAL_THRESHOLD") != std::string::npos);
  }
}

TEST_CASE("SLX anchor is the time midpoint of the first left and the following right peak") {
  AttemptSegment seg;
  seg.source_meta.task = TaskKind::Slx;
  seg.source_meta.sample_rate = kRate;
  for (int i = 0; i <= 3000; ++i) {
    const double t = i * 0.01, lx = 12.5 * t;
    // Straight for 2 s, then lateral sine with period 4 s: left peak at t = 3, right peak at t = 5.
    const double ly = t < 2.0 ? 0.0 : 2.8 * std::sin(kPi / 2.0 * (t - 2.0));
    seg.samples.push_back(to_world(lx, ly, 0.0, t, 12.5));
  }
  const auto layout = bundled_layout(TaskKind::Slx);
  const auto anchor = locate_anchor(seg, layout, 1);
  CHECK(anchor.t_anchor == doctest::Approx(4.0).epsilon(1e-6));
  const auto aligned = to_task_frame(seg, anchor, layout);
  CHECK(aligned.samples[400].x == doctest::Approx(layout.reference_pose.x).epsilon(1e-6));
  CHECK(aligned.samples[400].y == doctest::Approx(layout.reference_pose.y).epsilon(1e-6));
}

TEST_CASE("CLV alignment moves the circle centre to the origin") {
  AttemptSegment seg;
  seg.source_meta.task = TaskKind::Clv;
  seg.source_meta.sample_rate = kRate;
  std::mt19937 rng(2);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int i = 0; i < 4000; ++i) {
    const double a = -0.004 * i;
    seg.samples.push_back(
        {0.01 * i, 140.0 + 56.0 * std::cos(a) + noise(rng), -75.0 + 56.0 * std::sin(a) + noise(rng), a - kPi / 2, 13.0});
  }
  const auto layout = bundled_layout(TaskKind::Clv);
  const auto anchor = locate_anchor(seg, layout, 5);
  CHECK(anchor.method == AnchorMethod::CircleCentre);
  CHECK(std::hypot(anchor.x - 140.0, anchor.y + 75.0) < 0.1);
  const auto aligned = to_task_frame(seg, anchor, layout);
  for (std::size_t i = 0; i < aligned.samples.size(); i += 400) {
    CHECK(std::hypot(aligned.samples[i].x, aligned.samples[i].y) == doctest::Approx(56.0).epsilon(0.01));
  }
}

TEST_CASE("alignment is a rigid motion") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-100, 100);
  AttemptSegment seg;
  for (int i = 0; i < 200; ++i) seg.samples.push_back({0.01 * i, u(rng), u(rng), u(rng) / 30.0, 1.0});
  AnchorPose anchor{0.0, u(rng), u(rng), 1.3, AnchorMethod::LateralThreshold};
  const auto out = to_task_frame(seg, anchor, bundled_layout(TaskKind::Lct));
  for (int k = 0; k < 100; ++k) {
    const std::size_t i = static_cast<std::size_t>(k), j = static_cast<std::size_t>(199 - k);
    const double before = std::hypot(seg.samples[i].x - seg.samples[j].x, seg.samples[i].y - seg.samples[j].y);
    const double after = std::hypot(out.samples[i].x - out.samples[j].x, out.samples[i].y - out.samples[j].y);
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
    const double dh = wrap_angle((out.samples[i].heading - out.samples[j].heading) -
                                 (seg.samples[i].heading - seg.samples[j].heading));
    CHECK(std::abs(dh) < 1e-9);
  }
}

TEST_CASE("attempt files round-trip their metadata") {
  AttemptSegment seg;
  seg.source_meta.driver_id = "p3";
  seg.source_meta.task = TaskKind::Slx;
  seg.source_meta.environment = Environment::NoTrq;
  seg.attempt_index = 3;
  seg.cone_hits = 1;
  seg.anchor = AnchorPose{12.5, 1.0, -2.0, 0.25, AnchorMethod::PeakMidpoint};
  seg.aligned = true;
  seg.samples.push_back({0.0, 1.0, 2.0, 0.0, 3.0});
  const AttemptSegment back = attempt_from_log(parse_drive_log(write_drive_log(attempt_to_log(seg))));
  CHECK(back.attempt_index == 3);
  CHECK(back.cone_hits == 1);
  REQUIRE(back.anchor);
  CHECK(back.anchor->method == AnchorMethod::PeakMidpoint);
  CHECK(back.anchor->t_anchor == 12.5);
  CHECK(back.aligned);
  CHECK(back.source_meta.extra.empty());
  DriveLog bare = attempt_to_log(seg);
  bare.meta.extra.erase("attempt_index");
  CHECK_THROWS_AS(attempt_from_log(bare), ValidationError);
}
