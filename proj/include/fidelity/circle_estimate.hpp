#pragma once

#include <cstdint>
#include <span>

#include "fidelity/path.hpp"

namespace fidelity {

struct CircleEstimate {
  double centre_x = 0.0;
  double centre_y = 0.0;
  double radius_median = 0.0;
  int n_valid_triples = 0;
  std::uint64_t seed = 0;
};

inline constexpr int kDefaultCircleTriples = 500;

/// Draws `n_samples` triples of distinct points, intersects the perpendicular
/// bisectors of AB and BC for each, and returns the component-wise medians of
/// the centres together with the median point distance from that centre.
/// Triples whose smallest altitude is below 1e-6 of their longest side are
/// skipped. Throws EstimationError when no triple is usable.
CircleEstimate estimate_circle_centre(std::span<const Point2> points, int n_samples, std::uint64_t seed);

}  // namespace fidelity
