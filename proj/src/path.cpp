#include "fidelity/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fidelity/errors.hpp"
#include "fidelity/signal.hpp"

namespace fidelity {

PathSpec PathSpec::polyline(std::vector<Point2> vertices) {
  PathSpec p;
  p.kind = PathKind::Polyline;
  p.vertices = std::move(vertices);
  return p;
}

PathSpec PathSpec::circle(Point2 centre, double radius, TurnDirection direction) {
  PathSpec p;
  p.kind = PathKind::Circle;
  p.centre = centre;
  p.radius = radius;
  p.direction = direction;
  return p;
}

void PathSpec::validate() const {
  if (kind == PathKind::Circle) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("circle path requires a positive radius");
    return;
  }
  if (vertices.size() < 2) throw ValidationError("polyline path requires at least 2 vertices");
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    if (std::hypot(vertices[i].x - vertices[i - 1].x, vertices[i].y - vertices[i - 1].y) <= 0.0) {
      throw ValidationError("polyline path has a zero-length segment at vertex " + std::to_string(i));
    }
  }
}

PathGeometry::PathGeometry(PathSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.kind == PathKind::Circle) {
    length_ = 2.0 * kPi * spec_.radius;
    return;
  }
  cumulative_.assign(spec_.vertices.size(), 0.0);
  for (std::size_t i = 1; i < spec_.vertices.size(); ++i) {
    const auto& a = spec_.vertices[i - 1];
    const auto& b = spec_.vertices[i];
    cumulative_[i] = cumulative_[i - 1] + std::hypot(b.x - a.x, b.y - a.y);
  }
  length_ = cumulative_.back();
}

double PathGeometry::project(Point2 p) const {
  if (spec_.kind == PathKind::Circle) return project_near(p, 0.0, 0);
  return project_range(p, 0, spec_.vertices.size() - 1);
}

double PathGeometry::project_near(Point2 p, double hint, std::size_t window) const {
  if (spec_.kind == PathKind::Circle) {
    const double theta = std::atan2(p.y - spec_.centre.y, p.x - spec_.centre.x);
    const double sign = spec_.direction == TurnDirection::Ccw ? 1.0 : -1.0;
    // Pick the arc parameter closest to the hint so tracking stays continuous across laps.
    const double base = sign * theta * spec_.radius;
    const double lap = length_;
    const double k = std::round((hint - base) / lap);
    return base + k * lap;
  }
  const std::size_t segments = spec_.vertices.size() - 1;
  const std::size_t centre = segment_of(hint);
  const std::size_t first = centre > window ? centre - window : 0;
  const std::size_t last = std::min(segments, centre + window + 1);
  return project_range(p, first, last);
}

double PathGeometry::project_range(Point2 p, std::size_t first, std::size_t last) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    const auto& a = spec_.vertices[i];
    const auto& b = spec_.vertices[i + 1];
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double seg2 = dx * dx + dy * dy;
    const double f = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / seg2, 0.0, 1.0);
    const double qx = a.x + f * dx - p.x, qy = a.y + f * dy - p.y;
    const double d2 = qx * qx + qy * qy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = cumulative_[i] + f * std::sqrt(seg2);
    }
  }
  return best_s;
}

std::size_t PathGeometry::segment_of(double s) const {
  if (s <= 0.0) return 0;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const auto idx = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  return std::min(idx == 0 ? 0 : idx - 1, spec_.vertices.size() - 2);
}

Point2 PathGeometry::point_at(double s) const {
  if (spec_.kind == PathKind::Circle) {
    const double sign = spec_.direction == TurnDirection::Ccw ? 1.0 : -1.0;
    const double theta = sign * s / spec_.radius;
    return {spec_.centre.x + spec_.radius * std::cos(theta), spec_.centre.y + spec_.radius * std::sin(theta)};
  }
  const std::size_t i = segment_of(s);
  const auto& a = spec_.vertices[i];
  const auto& b = spec_.vertices[i + 1];
  const double seg = cumulative_[i + 1] - cumulative_[i];
  const double f = (s - cumulative_[i]) / seg;
  return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
}

}  // namespace fidelity
