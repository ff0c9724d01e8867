#pragma once

#include <cstddef>
#include <vector>

namespace fidelity {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

enum class PathKind { Polyline, Circle };
enum class TurnDirection { Cw, Ccw };

/// Desired path for the steering model: either a polyline or a circle.
struct PathSpec {
  PathKind kind = PathKind::Polyline;
  std::vector<Point2> vertices;
  Point2 centre;
  double radius = 0.0;
  TurnDirection direction = TurnDirection::Ccw;

  static PathSpec polyline(std::vector<Point2> vertices);
  static PathSpec circle(Point2 centre, double radius, TurnDirection direction);

  /// Throws ValidationError unless a polyline has >= 2 vertices (with no
  /// zero-length segments) or a circle has a positive radius.
  void validate() const;
};

/// Arc-length parametrisation of a PathSpec. For circles the parameter grows
/// in the direction of travel; polylines extrapolate linearly past either end.
class PathGeometry {
 public:
  explicit PathGeometry(PathSpec spec);

  const PathSpec& spec() const noexcept { return spec_; }
  double length() const noexcept { return length_; }

  /// Arc parameter of the path point nearest to `p` (global search; ties go to the smaller parameter).
  double project(Point2 p) const;

  /// Same as project() but only searches polyline segments within
  /// `window` segments of the one containing `hint`. Circles ignore the hint.
  double project_near(Point2 p, double hint, std::size_t window) const;

  Point2 point_at(double s) const;

 private:
  double project_range(Point2 p, std::size_t first, std::size_t last) const;
  std::size_t segment_of(double s) const;

  PathSpec spec_;
  std::vector<double> cumulative_;
  double length_ = 0.0;
};

}  // namespace fidelity
