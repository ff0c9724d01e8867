#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fidelity/path.hpp"
#include "fidelity/types.hpp"

namespace fidelity {

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

struct Cone {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double radius = 0.15;
};

/// Normal-law statistics of a surface: friction coefficient and elevation (metres).
struct SurfaceStats {
  double mu_mean = 0.4;
  double mu_sd = 0.02;
  double elevation_mean = 0.004;
  double elevation_sd = 0.001;
};

struct SurfacePatch {
  std::string name;
  std::vector<Point2> polygon;
  SurfaceStats stats;
};

struct Bounds {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
};

/// Geometry of one manoeuvre in its task frame (+X is the nominal direction of travel
/// for LCT and SLX; CLV circles are centred on the origin).
struct TaskLayout {
  TaskKind task = TaskKind::Lct;
  double nominal_speed = 12.5;  // m/s
  std::vector<Cone> cones;
  std::vector<SurfacePatch> patches;
  PathSpec nominal_path;
  std::optional<TurnDirection> direction;  // CLV only
  SurfaceStats default_surface;            // applies wherever no patch covers the ground
  Pose2 reference_pose;                    // where an attempt's anchor lands after alignment
  std::optional<Pose2> start_pose;         // simulator launch pose
  std::optional<Bounds> bounds;            // friction-grid extent
};

/// Reads the line-oriented layout format and validates it (see validate_layout).
TaskLayout parse_task_layout(std::istream& in);
TaskLayout parse_task_layout(std::string_view text);

void write_task_layout(std::ostream& out, const TaskLayout& layout);
std::string write_task_layout(const TaskLayout& layout);

/// Checks per-task structure: SLX gate of two cones 5 m apart plus eight
/// cones spaced 25 m; LCT has exactly one low-friction patch between its
/// gates; CLV has a circular path with a direction. Throws ValidationError.
void validate_layout(const TaskLayout& layout);

/// Default layouts for the three manoeuvres.
TaskLayout bundled_layout(TaskKind task);

/// Longitudinal coordinate of the entry gate (smallest cone x).
double entry_gate_x(const TaskLayout& layout);
/// Longitudinal coordinate of the final gate (largest cone x).
double final_gate_x(const TaskLayout& layout);
/// The eight slalom cones of an SLX layout, ordered by x.
std::vector<Cone> slalom_cones(const TaskLayout& layout);

Bounds layout_bounds(const TaskLayout& layout);
Pose2 layout_start_pose(const TaskLayout& layout);

bool point_in_polygon(Point2 p, const std::vector<Point2>& polygon);
bool polygon_is_simple(const std::vector<Point2>& polygon);

/// Replaces the default surface friction mean and, when `low_mu` is given, the
/// friction mean of every patch slipperier than the default surface.
TaskLayout with_friction(TaskLayout layout, std::optional<double> default_mu, std::optional<double> low_mu);

}  // namespace fidelity
