#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fidelity/layout.hpp"

namespace fidelity {

inline constexpr double kGridResolution = 0.5;
inline constexpr double kMuFloor = 0.05;
inline constexpr double kMuCeiling = 1.5;

/// Node-based surface raster: node (i, j) sits at origin + (i, j) * resolution.
/// Values are stored row-major with x varying fastest.
struct FrictionGrid {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double resolution = kGridResolution;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> mu;
  std::vector<double> elevation;
  std::uint64_t seed = 0;

  double mu_node(std::size_t i, std::size_t j) const { return mu[j * nx + i]; }
  double elevation_node(std::size_t i, std::size_t j) const { return elevation[j * nx + i]; }
  void validate() const;
};

/// Samples every node from the normal law of the first patch containing it
/// (or the layout's default surface), friction clamped to [0.05, 1.5].
FrictionGrid generate_friction_grid(const TaskLayout& layout, std::uint64_t seed, double resolution = kGridResolution);

/// Grid with one friction value everywhere (elevation zero).
FrictionGrid uniform_friction_grid(const Bounds& bounds, double mu, double resolution = kGridResolution);

/// Bilinear interpolation between the four surrounding nodes; queries outside
/// the grid are clamped to its boundary.
double friction_at(const FrictionGrid& grid, double x, double y);
double elevation_at(const FrictionGrid& grid, double x, double y);

/// Plain-text dump: `origin_x origin_y resolution nx ny seed` header line,
/// then `mu` and `elevation` sections of ny rows with nx values each.
void write_friction_grid(std::ostream& out, const FrictionGrid& grid);
FrictionGrid read_friction_grid(std::istream& in);

}  // namespace fidelity
