#include "fidelity/cone_contact.hpp"

#include <algorithm>
#include <cmath>

namespace fidelity {

bool footprint_touches_cone(const Pose2& pose, const Footprint& footprint, const Cone& cone) {
  const double dx = cone.x - pose.x, dy = cone.y - pose.y;
  const double c = std::cos(pose.heading), s = std::sin(pose.heading);
  // Cone centre in the body frame.
  const double lon = c * dx + s * dy;
  const double lat = -s * dx + c * dy;
  const double ex = std::max(0.0, std::abs(lon) - 0.5 * footprint.length);
  const double ey = std::max(0.0, std::abs(lat) - 0.5 * footprint.width);
  return ex * ex + ey * ey <= cone.radius * cone.radius;
}

std::vector<std::size_t> cones_touched(const Pose2& pose, const Footprint& footprint, const TaskLayout& layout) {
  std::vector<std::size_t> hits;
  const double reach = 0.5 * std::hypot(footprint.length, footprint.width);
  for (std::size_t i = 0; i < layout.cones.size(); ++i) {
    const Cone& cone = layout.cones[i];
    if (std::hypot(cone.x - pose.x, cone.y - pose.y) > reach + cone.radius) continue;
    if (footprint_touches_cone(pose, footprint, cone)) hits.push_back(i);
  }
  return hits;
}

int count_cone_hits(std::span<const TrajectorySample> samples, const TaskLayout& layout, const Footprint& footprint) {
  std::vector<bool> hit(layout.cones.size(), false);
  for (const auto& s : samples) {
    for (std::size_t i : cones_touched({s.x, s.y, s.heading}, footprint, layout)) hit[i] = true;
  }
  return static_cast<int>(std::count(hit.begin(), hit.end(), true));
}

}  // namespace fidelity
