#include "tables.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "fidelity/errors.hpp"
#include "fidelity/signal.hpp"

namespace fidelity::cli {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double number(const std::string& cell, std::size_t line) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (cell.empty() || res.ec != std::errc() || res.ptr != last) throw ParseError(line, "malformed number '" + cell + "'");
  return v;
}

int integer(const std::string& cell, std::size_t line) {
  int v = 0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw ParseError(line, "malformed integer '" + cell + "'");
  }
  return v;
}

Environment environment(const std::string& cell, std::size_t line) {
  auto env = parse_environment(cell);
  if (!env) throw ParseError(line, "unknown environment '" + cell + "'");
  return *env;
}

TaskKind task(const std::string& cell, std::size_t line) {
  auto t = parse_task(cell);
  if (!t) throw ParseError(line, "unknown task '" + cell + "'");
  return *t;
}

/// Calls `row(cells, line_no)` for every data line after the expected header.
template <typename F>
void for_each_row(std::string_view text, std::string_view header, std::size_t columns, F&& row) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) throw ParseError(line_no, "malformed header (expected '" + std::string(header) + "')");
      seen_header = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != columns) {
      throw ParseError(line_no, "expected " + std::to_string(columns) + " columns, found " + std::to_string(cells.size()));
    }
    row(cells, line_no);
  }
  if (!seen_header) throw ParseError(0, "missing header");
}

}  // namespace

std::string write_metric_rows(std::span<const MetricRow> rows) {
  std::string out(kMetricHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.driver + ',' + std::string(to_string(r.environment)) + ',' + std::string(to_string(r.task)) + ',' +
           std::to_string(r.attempt) + ',' + r.metric.name + ',' + format_number(r.metric.value) + ',' + r.metric.unit +
           '\n';
  }
  return out;
}

std::vector<MetricRow> parse_metric_rows(std::string_view text) {
  std::vector<MetricRow> rows;
  for_each_row(text, kMetricHeader, 7, [&](const std::vector<std::string>& c, std::size_t line) {
    MetricRow r;
    r.driver = c[0];
    r.environment = environment(c[1], line);
    r.task = task(c[2], line);
    r.attempt = integer(c[3], line);
    r.metric = {c[4], number(c[5], line), c[6]};
    rows.push_back(std::move(r));
  });
  return rows;
}

std::string write_fit_rows(std::span<const FitRow> rows) {
  std::string out(kFitHeader);
  out += '\n';
  for (const auto& r : rows) {
    const ModelFit& f = r.fit;
    out += r.driver + ',' + std::string(to_string(r.environment)) + ',' + std::string(to_string(r.task)) + ',' +
           std::to_string(r.attempt) + ',' + std::string(to_string(f.model)) + ',' + format_number(f.gain) + ',' +
           format_number(f.response_delay) + ',' + format_number(f.preview_time) + ',' + format_number(f.rms_error) +
           ',' + format_number(f.r_squared) + ',';
    if (f.avg_adjustment_magnitude) out += format_number(*f.avg_adjustment_magnitude);
    out += ',';
    if (f.n_adjustments) out += std::to_string(*f.n_adjustments);
    out += '\n';
  }
  return out;
}

std::vector<FitRow> parse_fit_rows(std::string_view text) {
  std::vector<FitRow> rows;
  for_each_row(text, kFitHeader, 12, [&](const std::vector<std::string>& c, std::size_t line) {
    FitRow r;
    r.driver = c[0];
    r.environment = environment(c[1], line);
    r.task = task(c[2], line);
    r.attempt = integer(c[3], line);
    auto model = parse_model(c[4]);
    if (!model) throw ParseError(line, "unknown model '" + c[4] + "'");
    r.fit.model = *model;
    r.fit.gain = number(c[5], line);
    r.fit.response_delay = number(c[6], line);
    r.fit.preview_time = number(c[7], line);
    r.fit.rms_error = number(c[8], line);
    r.fit.r_squared = number(c[9], line);
    if (!c[10].empty()) r.fit.avg_adjustment_magnitude = number(c[10], line);
    if (!c[11].empty()) r.fit.n_adjustments = integer(c[11], line);
    rows.push_back(std::move(r));
  });
  return rows;
}

ModelKind report_model(TaskKind task) { return task == TaskKind::Clv ? ModelKind::Idpyre : ModelKind::Dpyre; }

std::vector<MeasureRow> measure_rows(std::span<const MetricRow> metrics, std::span<const FitRow> fits) {
  std::vector<MeasureRow> rows;
  for (const auto& m : metrics) rows.push_back({m.driver, m.environment, m.task, m.attempt, m.metric.name, m.metric.value});
  for (const auto& f : fits) {
    if (f.fit.model != report_model(f.task)) continue;
    auto add = [&](const std::string& name, double v) {
      rows.push_back({f.driver, f.environment, f.task, f.attempt, name, v});
    };
    const auto names = model_measure_names(f.task);
    for (const auto& name : names) {
      if (name == "T_R") {
        add(name, f.fit.response_delay);
      } else if (name == "K" || name == "k") {
        add(name, f.fit.gain);
      } else if (name == "rms_error") {
        add(name, f.fit.rms_error);
      } else if (name == "avg_adjustment" && f.fit.avg_adjustment_magnitude) {
        add(name, *f.fit.avg_adjustment_magnitude);
      }
    }
  }
  return rows;
}

std::vector<RatingRow> rating_rows(std::span<const AttemptSegment> attempts) {
  std::map<std::tuple<std::string, Environment, TaskKind>, double> seen;
  for (const auto& a : attempts) {
    if (!a.source_meta.realism_rating) continue;
    seen.emplace(std::tuple{a.source_meta.driver_id, a.source_meta.environment, a.source_meta.task},
                 *a.source_meta.realism_rating);
  }
  std::vector<RatingRow> rows;
  for (const auto& [key, rating] : seen) rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), rating});
  return rows;
}

std::optional<PlotKind> parse_plot_kind(std::string_view text) {
  if (text == "yawrate_vs_swa") return PlotKind::YawRateVsSwa;
  if (text == "trajectory") return PlotKind::Trajectory;
  if (text == "steering_timeseries") return PlotKind::SteeringTimeseries;
  return std::nullopt;
}

std::string plot_data(std::span<const AttemptSegment> attempts, PlotKind kind) {
  if (attempts.empty()) throw ValidationError("no attempts to plot");
  std::string out;
  switch (kind) {
    case PlotKind::YawRateVsSwa: out = "swa_deg,yawrate_degps,env\n"; break;
    case PlotKind::Trajectory: out = "x,y,env\n"; break;
    case PlotKind::SteeringTimeseries: out = "t,swa_deg,env\n"; break;
  }
  for (Environment env : kAllEnvironments) {
    const std::string tag(to_string(env));
    for (const auto& a : attempts) {
      if (a.source_meta.environment != env) continue;
      const auto samples = complete_kinematics(a);
      const double t0 = samples.empty() ? 0.0 : samples.front().t;
      for (const auto& s : samples) {
        double u = 0.0, v = 0.0;
        switch (kind) {
          case PlotKind::YawRateVsSwa: u = s.swa / kDegree; v = s.yaw_rate.value_or(NAN) / kDegree; break;
          case PlotKind::Trajectory: u = s.x; v = s.y; break;
          case PlotKind::SteeringTimeseries: u = s.t - t0; v = s.swa / kDegree; break;
        }
        if (!std::isfinite(u) || !std::isfinite(v)) continue;
        out += format_number(u) + ',' + format_number(v) + ',' + tag + '\n';
      }
    }
  }
  return out;
}

}  // namespace fidelity::cli
