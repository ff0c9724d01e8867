#include "fidelity/circle_estimate.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "fidelity/errors.hpp"
#include "fidelity/random.hpp"
#include "fidelity/signal.hpp"

namespace fidelity {

namespace {

constexpr double kCollinearRatio = 1e-6;

/// Intersection of the perpendicular bisectors of AB and BC, or nothing for a near-degenerate triangle.
std::optional<Point2> bisector_intersection(Point2 a, Point2 b, Point2 c) {
  const double ab = std::hypot(b.x - a.x, b.y - a.y);
  const double bc = std::hypot(c.x - b.x, c.y - b.y);
  const double ca = std::hypot(a.x - c.x, a.y - c.y);
  const double longest = std::max({ab, bc, ca});
  if (!(longest > 0.0)) return std::nullopt;
  const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  // Smallest altitude is the one onto the longest side: 2 * area / longest.
  const double min_altitude = std::abs(cross) / longest;
  if (min_altitude < kCollinearRatio * longest) return std::nullopt;

  // Bisector of AB: (p - m1) . (b - a) = 0, bisector of BC: (p - m2) . (c - b) = 0.
  const double ux = b.x - a.x, uy = b.y - a.y;
  const double vx = c.x - b.x, vy = c.y - b.y;
  const double r1 = 0.5 * (ux * (a.x + b.x) + uy * (a.y + b.y));
  const double r2 = 0.5 * (vx * (b.x + c.x) + vy * (b.y + c.y));
  const double det = ux * vy - uy * vx;
  return Point2{(r1 * vy - uy * r2) / det, (ux * r2 - r1 * vx) / det};
}

}  // namespace

CircleEstimate estimate_circle_centre(std::span<const Point2> points, int n_samples, std::uint64_t seed) {
  if (points.size() < 3) throw EstimationError("circle estimation requires at least 3 points");
  if (n_samples < 1) throw ValidationError("circle estimation requires at least one triple");

  Rng rng(seed);
  const std::size_t n = points.size();
  std::vector<double> xs, ys;
  xs.reserve(static_cast<std::size_t>(n_samples));
  ys.reserve(static_cast<std::size_t>(n_samples));
  for (int draw = 0; draw < n_samples; ++draw) {
    // Three distinct indices, uniformly: draw from shrinking ranges and skip past taken slots.
    std::size_t i = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    std::size_t j = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
    std::size_t k = std::uniform_int_distribution<std::size_t>(0, n - 3)(rng);
    if (j >= i) ++j;
    const std::size_t lo = std::min(i, j), hi = std::max(i, j);
    if (k >= lo) ++k;
    if (k >= hi) ++k;
    if (auto c = bisector_intersection(points[i], points[j], points[k])) {
      xs.push_back(c->x);
      ys.push_back(c->y);
    }
  }
  if (xs.empty()) throw EstimationError("all sampled point triples are collinear; no circle centre exists");

  CircleEstimate est;
  est.n_valid_triples = static_cast<int>(xs.size());
  est.centre_x = median(std::move(xs));
  est.centre_y = median(std::move(ys));
  est.seed = seed;

  std::vector<double> radii;
  radii.reserve(n);
  for (const auto& p : points) radii.push_back(std::hypot(p.x - est.centre_x, p.y - est.centre_y));
  est.radius_median = median(std::move(radii));
  return est;
}

}  // namespace fidelity
