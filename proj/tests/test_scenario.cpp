#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fidelity/attempts.hpp"
#include "fidelity/drive_log.hpp"
#include "fidelity/errors.hpp"
#include "fidelity/metrics.hpp"
#include "fidelity/scenario.hpp"
#include "fidelity/signal.hpp"

using namespace fidelity;

namespace {

DriverProfile steady_driver(double gain, double delay, double preview) {
  DriverProfile d;
  d.steering = {gain, delay, preview};
  return d;
}

std::vector<MetricSet> metrics_of(const DriveLog& log, const TaskLayout& layout) {
  std::vector<MetricSet> out;
  for (const auto& a : extract_attempts(log, layout, 1)) out.push_back(attempt_metrics(a, layout));
  return out;
}

double total(const std::vector<MetricSet>& sets, const char* name) {
  double sum = 0.0;
  for (const auto& s : sets) sum += s.at(name);
  return sum;
}

/// Largest distance from the nominal path over the manoeuvre area.
double max_path_error(const DriveLog& log, const TaskLayout& layout) {
  const PathGeometry path(layout.nominal_path);
  double worst = 0.0;
  for (const auto& s : log.samples) {
    if (s.x < 0.0 || s.x > 80.0) continue;
    const Point2 q = path.point_at(path.project({s.x, s.y}));
    worst = std::max(worst, std::hypot(s.x - q.x, s.y - q.y));
  }
  return worst;
}

}  // namespace

TEST_CASE("scenario runs are bit-reproducible") {
  const auto layout = bundled_layout(TaskKind::Slx);
  ScenarioConfig cfg;
  cfg.steering_noise_sd = 0.05;
  cfg.speed_jitter = 0.03;
  const auto driver = sample_driver(3, "d01");
  const auto a = write_drive_log(run_scenario(layout, VehicleParams{}, driver, 9, cfg));
  const auto b = write_drive_log(run_scenario(layout, VehicleParams{}, driver, 9, cfg));
  const auto c = write_drive_log(run_scenario(layout, VehicleParams{}, driver, 10, cfg));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("slalom on high grip clears every cone") {
  const auto layout = with_friction(bundled_layout(TaskKind::Slx), 0.8, std::nullopt);
  ScenarioConfig cfg;
  cfg.attempts = 2;
  const auto log = run_scenario(layout, VehicleParams{}, steady_driver(13.0, 0.1, 1.0), 4, cfg);
  const auto sets = metrics_of(log, layout);
  REQUIRE(sets.size() == 2);
  for (const auto& m : sets) {
    CHECK(m.at("cones_hit") == 0.0);
    CHECK(m.at("peak_lat_amp") == doctest::Approx(2.8).epsilon(0.25));
  }
}

TEST_CASE("circle drive settles in the expected speed and radius band") {
  const auto layout = bundled_layout(TaskKind::Clv);
  const auto log = run_scenario(layout, VehicleParams{}, sample_driver(1, "d01"), 2);
  const auto sets = metrics_of(log, layout);
  REQUIRE(sets.size() == 1);
  const double kmh = sets[0].at("avg_speed") * 3.6;
  CHECK(kmh >= 40.0);
  CHECK(kmh <= 55.0);
  CHECK(sets[0].at("avg_radius") == doctest::Approx(layout.nominal_path.radius).epsilon(0.05));
}

TEST_CASE("lower ice friction never reduces lane-change difficulty") {
  const auto base = bundled_layout(TaskKind::Lct);
  ScenarioConfig cfg;
  cfg.attempts = 4;
  double sum_hi = 0.0, sum_lo = 0.0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto driver = sample_driver(seed, "d01");
    const auto grippy = with_friction(base, std::nullopt, 0.2);
    const auto slick = with_friction(base, std::nullopt, 0.15);
    const auto log_hi = run_scenario(grippy, VehicleParams{}, driver, seed, cfg);
    const auto log_lo = run_scenario(slick, VehicleParams{}, driver, seed, cfg);
    const double hits_hi = total(metrics_of(log_hi, grippy), "cones_hit");
    const double hits_lo = total(metrics_of(log_lo, slick), "cones_hit");
    sum_hi += hits_hi;
    sum_lo += hits_lo;
    CAPTURE(seed);
    CAPTURE(hits_hi);
    CAPTURE(hits_lo);
    // Hits are discrete, so a single pair may trade a hit for a wider excursion.
    CHECK((hits_lo >= hits_hi || max_path_error(log_lo, slick) >= max_path_error(log_hi, grippy)));
  }
  CHECK(sum_lo >= sum_hi);
}

TEST_CASE("yaw rate splits into two clusters at large rightward steering on a slick patch") {
  const auto layout = with_friction(bundled_layout(TaskKind::Lct), 0.8, 0.05);
  const auto log = run_scenario(layout, VehicleParams{}, sample_driver(5, "d02"), 5);
  std::vector<double> yaw;
  for (const auto& s : log.samples) {
    if (s.swa < -30.0 * kDegree && s.speed > 5.0) yaw.push_back(*s.yaw_rate);
  }
  REQUIRE(yaw.size() > 20);
  std::sort(yaw.begin(), yaw.end());
  // Best two-means split, then Ashman's D; D > 2 separates the modes.
  double best = -1.0;
  for (std::size_t k = 2; k + 2 < yaw.size(); ++k) {
    const std::vector<double> lo(yaw.begin(), yaw.begin() + static_cast<long>(k));
    const std::vector<double> hi(yaw.begin() + static_cast<long>(k), yaw.end());
    const double sa = sample_sd(lo), sb = sample_sd(hi);
    const double d = std::sqrt(2.0) * std::abs(mean(hi) - mean(lo)) / std::sqrt(sa * sa + sb * sb + 1e-12);
    best = std::max(best, d);
  }
  CHECK(best - 2.0 > 0.0);
}

TEST_CASE("runs that leave the box or never finish are errors") {
  const auto layout = bundled_layout(TaskKind::Lct);
  ScenarioConfig box;
  box.divergence_half_width = 20.0;
  CHECK_THROWS_AS(run_scenario(layout, VehicleParams{}, sample_driver(1, "d01"), 1, box), SimulationError);
  ScenarioConfig slow;
  slow.max_attempt_time = 2.0;
  CHECK_THROWS_AS(run_scenario(layout, VehicleParams{}, sample_driver(1, "d01"), 1, slow), SimulationError);
}

TEST_CASE("sampled drivers stay inside their ranges") {
  for (int i = 0; i < 50; ++i) {
    const auto d = sample_driver(7, "d" + std::to_string(i));
    CHECK(d.steering.gain >= 10.0);
    CHECK(d.steering.gain <= 16.0);
    CHECK(d.steering.response_delay >= 0.1 - 1e-12);
    CHECK(d.steering.response_delay <= 0.2 + 1e-12);
    CHECK(d.steering.preview_time >= 1.3);
    CHECK(d.steering.preview_time <= 2.0);
  }
  CHECK(sample_driver(7, "a").steering.gain == sample_driver(7, "a").steering.gain);
}
