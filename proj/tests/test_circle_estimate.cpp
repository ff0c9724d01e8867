#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "fidelity/circle_estimate.hpp"
#include "fidelity/errors.hpp"
#include "fidelity/signal.hpp"

using namespace fidelity;

namespace {

std::vector<Point2> circle_points(double cx, double cy, double r, int n, double noise, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, noise);
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * kPi * i / n;
    pts.push_back({cx + r * std::cos(a) + (noise > 0 ? g(rng) : 0.0), cy + r * std::sin(a) + (noise > 0 ? g(rng) : 0.0)});
  }
  return pts;
}

/// Algebraic least-squares circle: x^2 + y^2 + D x + E y + F = 0.
Eigen::Vector2d kasa_centre(const std::vector<Point2>& pts) {
  Eigen::MatrixXd A(pts.size(), 3);
  Eigen::VectorXd b(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    A(i, 0) = pts[i].x;
    A(i, 1) = pts[i].y;
    A(i, 2) = 1.0;
    b(i) = -(pts[i].x * pts[i].x + pts[i].y * pts[i].y);
  }
  const Eigen::Vector3d sol = A.colPivHouseholderQr().solve(b);
  return {-sol(0) / 2, -sol(1) / 2};
}

}  // namespace

TEST_CASE("exact circle gives the centre to 1e-9") {
  const auto pts = circle_points(12.5, -40.0, 55.0, 720, 0.0, 0);
  const auto est = estimate_circle_centre(pts, 500, 1);
  CHECK(std::hypot(est.centre_x - 12.5, est.centre_y + 40.0) <= 1e-9);
  CHECK(est.radius_median == doctest::Approx(55.0).epsilon(1e-12));
  CHECK(est.n_valid_triples == 500);
  CHECK(est.seed == 1);
}

TEST_CASE("noisy circle agrees with a least-squares fit") {
  const auto pts = circle_points(0.0, 0.0, 55.0, 3000, 0.1, 9);
  const auto est = estimate_circle_centre(pts, 500, 4);
  const auto ls = kasa_centre(pts);
  CHECK(std::hypot(est.centre_x, est.centre_y) < 0.2);
  CHECK(std::hypot(est.centre_x - ls.x(), est.centre_y - ls.y()) < 0.05);
}

TEST_CASE("same seed, same estimate; collinear input is an error") {
  const auto pts = circle_points(1, 2, 30, 400, 0.2, 3);
  const auto a = estimate_circle_centre(pts, 200, 77);
  const auto b = estimate_circle_centre(pts, 200, 77);
  CHECK(a.centre_x == b.centre_x);
  CHECK(a.centre_y == b.centre_y);
  std::vector<Point2> line;
  for (int i = 0; i < 50; ++i) line.push_back({1.0 * i, 2.0 * i});
  CHECK_THROWS_AS(estimate_circle_centre(line, 100, 1), EstimationError);
  CHECK_THROWS_AS(estimate_circle_centre(std::vector<Point2>{{0, 0}, {1, 1}}, 10, 1), EstimationError);
}
