#include "fidelity/friction_grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "fidelity/errors.hpp"
#include "fidelity/random.hpp"
#include "fidelity/signal.hpp"

namespace fidelity {

void FrictionGrid::validate() const {
  if (!(resolution > 0.0)) throw ValidationError("grid resolution must be positive");
  if (nx < 1 || ny < 1 || mu.size() != nx * ny || elevation.size() != nx * ny) {
    throw ValidationError("grid dimensions do not match its values");
  }
  if (std::any_of(mu.begin(), mu.end(), [](double m) { return !(m > 0.0) || !std::isfinite(m); })) {
    throw ValidationError("grid friction values must be positive");
  }
}

namespace {

std::size_t node_count(double span, double resolution) {
  return static_cast<std::size_t>(std::floor(span / resolution + 1e-9)) + 1;
}

const SurfaceStats& surface_at(const TaskLayout& layout, Point2 p) {
  for (const auto& patch : layout.patches) {
    if (point_in_polygon(p, patch.polygon)) return patch.stats;
  }
  return layout.default_surface;
}

double bilinear(const FrictionGrid& g, const std::vector<double>& v, double x, double y) {
  const double fx = std::clamp((x - g.origin_x) / g.resolution, 0.0, static_cast<double>(g.nx - 1));
  const double fy = std::clamp((y - g.origin_y) / g.resolution, 0.0, static_cast<double>(g.ny - 1));
  const auto i = std::min(static_cast<std::size_t>(fx), g.nx > 1 ? g.nx - 2 : 0);
  const auto j = std::min(static_cast<std::size_t>(fy), g.ny > 1 ? g.ny - 2 : 0);
  const double tx = g.nx > 1 ? fx - static_cast<double>(i) : 0.0;
  const double ty = g.ny > 1 ? fy - static_cast<double>(j) : 0.0;
  const std::size_t i1 = g.nx > 1 ? i + 1 : i;
  const std::size_t j1 = g.ny > 1 ? j + 1 : j;
  const double v00 = v[j * g.nx + i], v10 = v[j * g.nx + i1];
  const double v01 = v[j1 * g.nx + i], v11 = v[j1 * g.nx + i1];
  // Exact at nodes: weights of zero contribute nothing.
  if (tx == 0.0 && ty == 0.0) return v00;
  return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
}

}  // namespace

FrictionGrid generate_friction_grid(const TaskLayout& layout, std::uint64_t seed, double resolution) {
  if (!(resolution > 0.0)) throw ValidationError("grid resolution must be positive");
  const Bounds b = layout_bounds(layout);
  FrictionGrid g;
  g.origin_x = b.x_min;
  g.origin_y = b.y_min;
  g.resolution = resolution;
  g.nx = node_count(b.x_max - b.x_min, resolution);
  g.ny = node_count(b.y_max - b.y_min, resolution);
  g.seed = seed;
  g.mu.resize(g.nx * g.ny);
  g.elevation.resize(g.nx * g.ny);

  Rng mu_rng(stream_seed(seed, {hash_text("mu")}));
  Rng elevation_rng(stream_seed(seed, {hash_text("elevation")}));
  std::normal_distribution<double> standard(0.0, 1.0);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const Point2 p{g.origin_x + static_cast<double>(i) * resolution, g.origin_y + static_cast<double>(j) * resolution};
      const SurfaceStats& s = surface_at(layout, p);
      const double mu = s.mu_mean + s.mu_sd * standard(mu_rng);
      g.mu[j * g.nx + i] = std::clamp(mu, kMuFloor, kMuCeiling);
      g.elevation[j * g.nx + i] = s.elevation_mean + s.elevation_sd * standard(elevation_rng);
    }
  }
  return g;
}

FrictionGrid uniform_friction_grid(const Bounds& bounds, double mu, double resolution) {
  if (!(mu > 0.0)) throw ValidationError("friction must be positive");
  FrictionGrid g;
  g.origin_x = bounds.x_min;
  g.origin_y = bounds.y_min;
  g.resolution = resolution;
  g.nx = node_count(bounds.x_max - bounds.x_min, resolution);
  g.ny = node_count(bounds.y_max - bounds.y_min, resolution);
  g.mu.assign(g.nx * g.ny, mu);
  g.elevation.assign(g.nx * g.ny, 0.0);
  return g;
}

double friction_at(const FrictionGrid& grid, double x, double y) { return bilinear(grid, grid.mu, x, y); }

double elevation_at(const FrictionGrid& grid, double x, double y) { return bilinear(grid, grid.elevation, x, y); }

void write_friction_grid(std::ostream& out, const FrictionGrid& grid) {
  out << format_number(grid.origin_x) << ' ' << format_number(grid.origin_y) << ' ' << format_number(grid.resolution)
      << ' ' << grid.nx << ' ' << grid.ny << ' ' << grid.seed << '\n';
  for (const auto* values : {&grid.mu, &grid.elevation}) {
    out << (values == &grid.mu ? "mu" : "elevation") << '\n';
    for (std::size_t j = 0; j < grid.ny; ++j) {
      for (std::size_t i = 0; i < grid.nx; ++i) {
        if (i) out << ' ';
        out << format_number((*values)[j * grid.nx + i]);
      }
      out << '\n';
    }
  }
}

FrictionGrid read_friction_grid(std::istream& in) {
  FrictionGrid g;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing grid header");
  {
    std::istringstream hs(line);
    if (!(hs >> g.origin_x >> g.origin_y >> g.resolution >> g.nx >> g.ny >> g.seed)) {
      throw ParseError(1, "malformed grid header");
    }
  }
  for (auto* values : {&g.mu, &g.elevation}) {
    const char* name = values == &g.mu ? "mu" : "elevation";
    ++line_no;
    if (!std::getline(in, line) || line != name) throw ParseError(line_no, std::string("expected section '") + name + "'");
    values->reserve(g.nx * g.ny);
    for (std::size_t j = 0; j < g.ny; ++j) {
      ++line_no;
      if (!std::getline(in, line)) throw ParseError(line_no, "truncated grid");
      std::istringstream rs(line);
      double v = 0.0;
      std::size_t count = 0;
      while (rs >> v) {
        values->push_back(v);
        ++count;
      }
      if (count != g.nx) throw ParseError(line_no, "expected " + std::to_string(g.nx) + " values");
    }
  }
  g.validate();
  return g;
}

}  // namespace fidelity
