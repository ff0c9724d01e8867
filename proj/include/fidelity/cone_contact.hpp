#pragma once

#include <span>
#include <vector>

#include "fidelity/layout.hpp"
#include "fidelity/types.hpp"

namespace fidelity {

/// Vehicle body rectangle, centred on the logged reference point.
struct Footprint {
  double length = 4.9;
  double width = 1.9;
};

/// True when the heading-oriented rectangle at `pose` touches the cone disc.
bool footprint_touches_cone(const Pose2& pose, const Footprint& footprint, const Cone& cone);

/// Indices (into layout.cones) of cones touched at a given pose.
std::vector<std::size_t> cones_touched(const Pose2& pose, const Footprint& footprint, const TaskLayout& layout);

/// Number of distinct cones touched anywhere along the samples (each cone counts once).
int count_cone_hits(std::span<const TrajectorySample> samples, const TaskLayout& layout, const Footprint& footprint = {});

}  // namespace fidelity
