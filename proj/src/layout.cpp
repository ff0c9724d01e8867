#include "fidelity/layout.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "fidelity/errors.hpp"
#include "fidelity/signal.hpp"

namespace fidelity {

namespace {

constexpr double kKph = 1.0 / 3.6;
constexpr double kGeomTol = 1e-6;

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    if (tok.front() == '#') break;
    out.push_back(tok);
  }
  return out;
}

double number(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(line, "malformed number '" + tok + "'");
  }
  return v;
}

void expect_args(const std::vector<std::string>& toks, std::size_t n, std::size_t line) {
  if (toks.size() != n + 1) {
    throw ParseError(line, "'" + toks[0] + "' expects " + std::to_string(n) + " values");
  }
}

TurnDirection parse_direction(const std::string& tok, std::size_t line) {
  if (tok == "CW") return TurnDirection::Cw;
  if (tok == "CCW") return TurnDirection::Ccw;
  throw ParseError(line, "unknown direction '" + tok + "'");
}

std::string_view direction_text(TurnDirection d) { return d == TurnDirection::Cw ? "CW" : "CCW"; }

Point2 centroid(const std::vector<Point2>& poly) {
  Point2 c;
  for (const auto& p : poly) {
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= static_cast<double>(poly.size());
  c.y /= static_cast<double>(poly.size());
  return c;
}

double orient(Point2 a, Point2 b, Point2 c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) return true;
  auto on_segment = [](Point2 p, Point2 q, Point2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

void validate_patch(const SurfacePatch& patch) {
  const auto& s = patch.stats;
  if (!(s.mu_mean > 0.0 && s.mu_mean <= 1.5)) throw ValidationError("patch '" + patch.name + "': mu_mean outside (0, 1.5]");
  if (s.mu_sd < 0.0 || s.elevation_sd < 0.0) throw ValidationError("patch '" + patch.name + "': negative standard deviation");
  if (patch.polygon.size() < 3) throw ValidationError("patch '" + patch.name + "': polygon needs at least 3 vertices");
  if (!polygon_is_simple(patch.polygon)) throw ValidationError("patch '" + patch.name + "': polygon is self-intersecting");
}

}  // namespace

bool point_in_polygon(Point2 p, const std::vector<Point2>& polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = polygon[i];
    const auto& b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool polygon_is_simple(const std::vector<Point2>& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = polygon[i], b = polygon[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex by construction.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      const Point2 c = polygon[j], d = polygon[(j + 1) % n];
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

double entry_gate_x(const TaskLayout& layout) {
  if (layout.cones.empty()) throw ValidationError("layout has no cones");
  return std::min_element(layout.cones.begin(), layout.cones.end(), [](const Cone& a, const Cone& b) { return a.x < b.x; })->x;
}

double final_gate_x(const TaskLayout& layout) {
  if (layout.cones.empty()) throw ValidationError("layout has no cones");
  return std::max_element(layout.cones.begin(), layout.cones.end(), [](const Cone& a, const Cone& b) { return a.x < b.x; })->x;
}

std::vector<Cone> slalom_cones(const TaskLayout& layout) {
  std::vector<Cone> sorted = layout.cones;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Cone& a, const Cone& b) { return a.x < b.x; });
  if (sorted.size() < 2) return {};
  return {sorted.begin() + 2, sorted.end()};
}

void validate_layout(const TaskLayout& layout) {
  if (!(layout.nominal_speed > 0.0)) throw ValidationError("nominal speed must be positive");
  layout.nominal_path.validate();
  for (const auto& patch : layout.patches) validate_patch(patch);
  if (!(layout.default_surface.mu_mean > 0.0 && layout.default_surface.mu_mean <= 1.5)) {
    throw ValidationError("default surface mu_mean outside (0, 1.5]");
  }
  for (const auto& cone : layout.cones) {
    if (!(cone.radius > 0.0)) throw ValidationError("cone " + std::to_string(cone.id) + " has non-positive radius");
  }

  switch (layout.task) {
    case TaskKind::Slx: {
      std::vector<Cone> sorted = layout.cones;
      std::stable_sort(sorted.begin(), sorted.end(), [](const Cone& a, const Cone& b) { return a.x < b.x; });
      if (sorted.size() < 2) throw ValidationError("SLX layout needs an entry gate");
      const Cone& g0 = sorted[0];
      const Cone& g1 = sorted[1];
      if (std::abs(g0.x - g1.x) > kGeomTol || std::abs(std::hypot(g0.x - g1.x, g0.y - g1.y) - 5.0) > kGeomTol) {
        throw ValidationError("SLX entry gate must be two cones 5 m apart");
      }
      const std::size_t count = sorted.size() - 2;
      if (count != 8) throw ValidationError("SLX slalom cone count is " + std::to_string(count) + ", expected 8");
      for (std::size_t i = 3; i < sorted.size(); ++i) {
        const double spacing = std::hypot(sorted[i].x - sorted[i - 1].x, sorted[i].y - sorted[i - 1].y);
        if (std::abs(spacing - 25.0) > kGeomTol) throw ValidationError("SLX slalom cones must be spaced 25 m");
      }
      break;
    }
    case TaskKind::Lct: {
      if (layout.cones.size() < 4) throw ValidationError("LCT layout needs entry and exit gates");
      const double x0 = entry_gate_x(layout), x1 = final_gate_x(layout);
      std::size_t low_mu = 0;
      for (const auto& patch : layout.patches) {
        if (patch.stats.mu_mean >= layout.default_surface.mu_mean) continue;
        const Point2 c = centroid(patch.polygon);
        if (c.x > x0 && c.x < x1) ++low_mu;
      }
      if (low_mu == 0) throw ValidationError("LCT layout is missing the low-mu patch between its gates");
      if (low_mu > 1) throw ValidationError("LCT layout has more than one low-mu patch between its gates");
      break;
    }
    case TaskKind::Clv: {
      if (layout.nominal_path.kind != PathKind::Circle) throw ValidationError("CLV layout requires a circle path");
      if (!layout.direction) throw ValidationError("CLV layout requires a direction");
      if (*layout.direction != layout.nominal_path.direction) {
        throw ValidationError("CLV direction disagrees with its path direction");
      }
      break;
    }
  }
}

TaskLayout parse_task_layout(std::istream& in) {
  TaskLayout layout;
  bool have_task = false, have_speed = false, have_path = false;
  std::string raw;
  std::size_t line_no = 0;

  enum class Block { None, Patch, Path };
  Block block = Block::None;
  SurfacePatch patch;
  std::vector<Point2> path_vertices;

  while (std::getline(in, raw)) {
    ++line_no;
    const auto toks = tokens_of(raw);
    if (toks.empty()) continue;
    const std::string& key = toks[0];

    if (block == Block::Patch) {
      if (key == "mu") {
        expect_args(toks, 2, line_no);
        patch.stats.mu_mean = number(toks[1], line_no);
        patch.stats.mu_sd = number(toks[2], line_no);
      } else if (key == "elevation") {
        expect_args(toks, 2, line_no);
        patch.stats.elevation_mean = number(toks[1], line_no);
        patch.stats.elevation_sd = number(toks[2], line_no);
      } else if (key == "vertex") {
        expect_args(toks, 2, line_no);
        patch.polygon.push_back({number(toks[1], line_no), number(toks[2], line_no)});
      } else if (key == "end") {
        layout.patches.push_back(std::move(patch));
        patch = SurfacePatch{};
        block = Block::None;
      } else {
        throw ParseError(line_no, "unexpected '" + key + "' inside patch block");
      }
      continue;
    }
    if (block == Block::Path) {
      if (key == "vertex") {
        expect_args(toks, 2, line_no);
        path_vertices.push_back({number(toks[1], line_no), number(toks[2], line_no)});
      } else if (key == "end") {
        layout.nominal_path = PathSpec::polyline(std::move(path_vertices));
        path_vertices.clear();
        have_path = true;
        block = Block::None;
      } else {
        throw ParseError(line_no, "unexpected '" + key + "' inside path block");
      }
      continue;
    }

    if (key == "task") {
      expect_args(toks, 1, line_no);
      auto t = parse_task(toks[1]);
      if (!t) throw ParseError(line_no, "unknown task '" + toks[1] + "'");
      layout.task = *t;
      have_task = true;
    } else if (key == "nominal_speed_kph") {
      expect_args(toks, 1, line_no);
      layout.nominal_speed = number(toks[1], line_no) * kKph;
      have_speed = true;
    } else if (key == "direction") {
      expect_args(toks, 1, line_no);
      layout.direction = parse_direction(toks[1], line_no);
    } else if (key == "reference_pose") {
      expect_args(toks, 3, line_no);
      layout.reference_pose = {number(toks[1], line_no), number(toks[2], line_no), number(toks[3], line_no)};
    } else if (key == "start_pose") {
      expect_args(toks, 3, line_no);
      layout.start_pose = Pose2{number(toks[1], line_no), number(toks[2], line_no), number(toks[3], line_no)};
    } else if (key == "bounds") {
      expect_args(toks, 4, line_no);
      layout.bounds = Bounds{number(toks[1], line_no), number(toks[2], line_no), number(toks[3], line_no),
                             number(toks[4], line_no)};
    } else if (key == "default_surface") {
      expect_args(toks, 4, line_no);
      layout.default_surface = {number(toks[1], line_no), number(toks[2], line_no), number(toks[3], line_no),
                                number(toks[4], line_no)};
    } else if (key == "cone") {
      expect_args(toks, 4, line_no);
      Cone c;
      c.id = static_cast<int>(number(toks[1], line_no));
      c.x = number(toks[2], line_no);
      c.y = number(toks[3], line_no);
      c.radius = number(toks[4], line_no);
      layout.cones.push_back(c);
    } else if (key == "patch") {
      expect_args(toks, 1, line_no);
      patch = SurfacePatch{};
      patch.name = toks[1];
      block = Block::Patch;
    } else if (key == "path") {
      if (toks.size() < 2) throw ParseError(line_no, "'path' expects a kind");
      if (toks[1] == "polyline") {
        expect_args(toks, 1, line_no);
        block = Block::Path;
      } else if (toks[1] == "circle") {
        expect_args(toks, 5, line_no);
        layout.nominal_path = PathSpec::circle({number(toks[2], line_no), number(toks[3], line_no)},
                                               number(toks[4], line_no), parse_direction(toks[5], line_no));
        have_path = true;
      } else {
        throw ParseError(line_no, "unknown path kind '" + toks[1] + "'");
      }
    } else {
      throw ParseError(line_no, "unknown layout key '" + key + "'");
    }
  }
  if (block != Block::None) throw ParseError(line_no, "unterminated block (missing 'end')");
  if (!have_task) throw ParseError(0, "layout is missing 'task'");
  if (!have_speed) throw ParseError(0, "layout is missing 'nominal_speed_kph'");
  if (!have_path) throw ParseError(0, "layout is missing 'path'");
  validate_layout(layout);
  return layout;
}

TaskLayout parse_task_layout(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_task_layout(in);
}

void write_task_layout(std::ostream& out, const TaskLayout& layout) {
  auto num = [](double v) { return format_number(v); };
  out << "task " << to_string(layout.task) << '\n';
  out << "nominal_speed_kph " << num(layout.nominal_speed * 3.6) << '\n';
  if (layout.direction) out << "direction " << direction_text(*layout.direction) << '\n';
  out << "reference_pose " << num(layout.reference_pose.x) << ' ' << num(layout.reference_pose.y) << ' '
      << num(layout.reference_pose.heading) << '\n';
  if (layout.start_pose) {
    out << "start_pose " << num(layout.start_pose->x) << ' ' << num(layout.start_pose->y) << ' '
        << num(layout.start_pose->heading) << '\n';
  }
  if (layout.bounds) {
    out << "bounds " << num(layout.bounds->x_min) << ' ' << num(layout.bounds->y_min) << ' '
        << num(layout.bounds->x_max) << ' ' << num(layout.bounds->y_max) << '\n';
  }
  const auto& d = layout.default_surface;
  out << "default_surface " << num(d.mu_mean) << ' ' << num(d.mu_sd) << ' ' << num(d.elevation_mean) << ' '
      << num(d.elevation_sd) << '\n';
  for (const auto& c : layout.cones) {
    out << "cone " << c.id << ' ' << num(c.x) << ' ' << num(c.y) << ' ' << num(c.radius) << '\n';
  }
  for (const auto& p : layout.patches) {
    out << "patch " << p.name << '\n';
    out << "mu " << num(p.stats.mu_mean) << ' ' << num(p.stats.mu_sd) << '\n';
    out << "elevation " << num(p.stats.elevation_mean) << ' ' << num(p.stats.elevation_sd) << '\n';
    for (const auto& v : p.polygon) out << "vertex " << num(v.x) << ' ' << num(v.y) << '\n';
    out << "end\n";
  }
  const auto& path = layout.nominal_path;
  if (path.kind == PathKind::Circle) {
    out << "path circle " << num(path.centre.x) << ' ' << num(path.centre.y) << ' ' << num(path.radius) << ' '
        << direction_text(path.direction) << '\n';
  } else {
    out << "path polyline\n";
    for (const auto& v : path.vertices) out << "vertex " << num(v.x) << ' ' << num(v.y) << '\n';
    out << "end\n";
  }
}

std::string write_task_layout(const TaskLayout& layout) {
  std::ostringstream out;
  write_task_layout(out, layout);
  return out.str();
}

Bounds layout_bounds(const TaskLayout& layout) {
  if (layout.bounds) return *layout.bounds;
  Bounds b{1e300, 1e300, -1e300, -1e300};
  auto grow = [&b](double x, double y) {
    b.x_min = std::min(b.x_min, x);
    b.y_min = std::min(b.y_min, y);
    b.x_max = std::max(b.x_max, x);
    b.y_max = std::max(b.y_max, y);
  };
  for (const auto& c : layout.cones) grow(c.x, c.y);
  for (const auto& p : layout.patches)
    for (const auto& v : p.polygon) grow(v.x, v.y);
  const auto& path = layout.nominal_path;
  if (path.kind == PathKind::Circle) {
    grow(path.centre.x - path.radius, path.centre.y - path.radius);
    grow(path.centre.x + path.radius, path.centre.y + path.radius);
  } else {
    for (const auto& v : path.vertices) grow(v.x, v.y);
  }
  constexpr double margin = 20.0;
  return {b.x_min - margin, b.y_min - margin, b.x_max + margin, b.y_max + margin};
}

Pose2 layout_start_pose(const TaskLayout& layout) {
  if (layout.start_pose) return *layout.start_pose;
  const PathGeometry geom(layout.nominal_path);
  const Point2 p0 = geom.point_at(0.0);
  const Point2 p1 = geom.point_at(1.0);
  return {p0.x, p0.y, std::atan2(p1.y - p0.y, p1.x - p0.x)};
}

TaskLayout with_friction(TaskLayout layout, std::optional<double> default_mu, std::optional<double> low_mu) {
  const double base = layout.default_surface.mu_mean;
  if (low_mu) {
    for (auto& p : layout.patches) {
      if (p.stats.mu_mean < base) p.stats.mu_mean = *low_mu;
    }
  }
  if (default_mu) layout.default_surface.mu_mean = *default_mu;
  validate_layout(layout);
  return layout;
}

namespace {

TaskLayout bundled_lct() {
  TaskLayout l;
  l.task = TaskKind::Lct;
  l.nominal_speed = 45.0 * kKph;
  // Entry gate on the approach lane, exit gates on the target lane 8 m to the right.
  l.cones = {{1, 0.0, 1.5, 0.15}, {2, 0.0, -1.5, 0.15}, {3, 60.0, -6.5, 0.15},
             {4, 60.0, -9.5, 0.15}, {5, 80.0, -6.5, 0.15}, {6, 80.0, -9.5, 0.15}};
  SurfacePatch ice;
  ice.name = "ice";
  ice.stats = {0.2, 0.005, 0.004, 0.001};
  ice.polygon = {{5.0, -7.0}, {60.0, -7.0}, {60.0, -1.0}, {5.0, -1.0}};
  l.patches = {ice};
  l.nominal_path = PathSpec::polyline({{-150.0, 0.0}, {15.0, 0.0}, {30.0, -8.0}, {250.0, -8.0}});
  // The nominal path is 1 m right of the approach lane at x = 16.875.
  l.reference_pose = {16.875, -1.0, 0.0};
  l.start_pose = Pose2{-100.0, 0.0, 0.0};
  l.bounds = Bounds{-160.0, -25.0, 220.0, 15.0};
  return l;
}

TaskLayout bundled_slx() {
  TaskLayout l;
  l.task = TaskKind::Slx;
  l.nominal_speed = 45.0 * kKph;
  l.cones = {{1, 0.0, 2.5, 0.15}, {2, 0.0, -2.5, 0.15}};
  for (int k = 1; k <= 8; ++k) l.cones.push_back({k + 2, 25.0 * k, 0.0, 0.15});

  // Cosine blends between the gate midpoint and alternating 2.8 m offsets
  // abeam each cone (first cone passed on the right).
  constexpr double amplitude = 2.8;
  std::vector<Point2> knots = {{-150.0, 0.0}, {0.0, 0.0}};
  for (int k = 1; k <= 8; ++k) knots.push_back({25.0 * k, (k % 2 == 1 ? -amplitude : amplitude)});
  knots.push_back({225.0, 0.0});
  knots.push_back({450.0, 0.0});
  std::vector<Point2> vertices;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const Point2 a = knots[i], b = knots[i + 1];
    const bool flat = a.y == b.y;
    const double step = flat ? (b.x - a.x) : 1.0;
    const auto n = static_cast<int>(std::lround((b.x - a.x) / step));
    for (int j = 0; j < n; ++j) {
      const double f = static_cast<double>(j) / n;
      vertices.push_back({a.x + f * (b.x - a.x), a.y + (b.y - a.y) * 0.5 * (1.0 - std::cos(kPi * f))});
    }
  }
  vertices.push_back(knots.back());
  l.nominal_path = PathSpec::polyline(std::move(vertices));
  // Midway between the left peak at the second cone and the right peak at the third.
  l.reference_pose = {62.5, 0.0, 0.0};
  l.start_pose = Pose2{-100.0, 0.0, 0.0};
  l.bounds = Bounds{-160.0, -20.0, 340.0, 20.0};
  return l;
}

TaskLayout bundled_clv() {
  TaskLayout l;
  l.task = TaskKind::Clv;
  l.nominal_speed = 60.0 * kKph;
  l.direction = TurnDirection::Cw;
  constexpr double cone_radius_m = 55.0;
  constexpr int n_cones = 24;
  for (int k = 0; k < n_cones; ++k) {
    const double a = 2.0 * kPi * k / n_cones;
    l.cones.push_back({k + 1, cone_radius_m * std::cos(a), cone_radius_m * std::sin(a), 0.15});
  }
  // Start cones sit just outside the driving line at the top of the circle.
  l.cones.push_back({n_cones + 1, -1.5, 59.0, 0.15});
  l.cones.push_back({n_cones + 2, 1.5, 59.0, 0.15});
  // Half a car width (0.95 m) from the inner cone line, measured from the car's inner side.
  const double path_radius = cone_radius_m + 0.95 + 0.95;
  l.nominal_path = PathSpec::circle({0.0, 0.0}, path_radius, TurnDirection::Cw);
  l.reference_pose = {0.0, 0.0, 0.0};
  l.start_pose = Pose2{0.0, path_radius, 0.0};
  l.bounds = Bounds{-80.0, -80.0, 80.0, 80.0};
  return l;
}

}  // namespace

TaskLayout bundled_layout(TaskKind task) {
  TaskLayout l;
  switch (task) {
    case TaskKind::Lct: l = bundled_lct(); break;
    case TaskKind::Slx: l = bundled_slx(); break;
    case TaskKind::Clv: l = bundled_clv(); break;
  }
  validate_layout(l);
  return l;
}

}  // namespace fidelity
