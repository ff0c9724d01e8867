#include "fidelity/drive_log.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "fidelity/errors.hpp"
#include "fidelity/signal.hpp"

namespace fidelity {

std::string_view to_string(Environment env) {
  switch (env) {
    case Environment::Real: return "REAL";
    case Environment::Std: return "STD";
    case Environment::NoTrq: return "NOTRQ";
    case Environment::NoMot: return "NOMOT";
  }
  return "REAL";
}

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::Lct: return "LCT";
    case TaskKind::Slx: return "SLX";
    case TaskKind::Clv: return "CLV";
  }
  return "LCT";
}

std::optional<Environment> parse_environment(std::string_view text) {
  for (Environment e : kAllEnvironments) {
    if (text == to_string(e)) return e;
  }
  return std::nullopt;
}

std::optional<TaskKind> parse_task(std::string_view text) {
  for (TaskKind t : kAllTasks) {
    if (text == to_string(t)) return t;
  }
  return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

double finite_number(std::string_view cell, std::size_t line, std::string_view field) {
  auto v = to_double(cell);
  if (!v) throw ParseError(line, "malformed number for '" + std::string(field) + "'");
  if (!std::isfinite(*v)) throw ParseError(line, "non-finite value for '" + std::string(field) + "'");
  return *v;
}

std::optional<double> optional_number(std::string_view cell, std::size_t line, std::string_view field) {
  if (trim(cell).empty()) return std::nullopt;
  return finite_number(cell, line, field);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

}  // namespace

DriveLog parse_drive_log(std::istream& in) {
  DriveLog log;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  bool have_driver = false, have_env = false, have_task = false, have_rate = false;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (!header_seen && line.front() == '#') {
      std::string_view body = trim(line.substr(1));
      const std::size_t eq = body.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "malformed metadata line (expected key=value)");
      const std::string key(trim(body.substr(0, eq)));
      const std::string_view value = trim(body.substr(eq + 1));
      if (key.empty()) throw ParseError(line_no, "malformed metadata line (empty key)");
      if (key == "driver_id") {
        if (value.empty()) throw ParseError(line_no, "empty driver_id");
        log.meta.driver_id = std::string(value);
        have_driver = true;
      } else if (key == "environment") {
        auto env = parse_environment(value);
        if (!env) throw ParseError(line_no, "unknown environment '" + std::string(value) + "'");
        log.meta.environment = *env;
        have_env = true;
      } else if (key == "task") {
        auto task = parse_task(value);
        if (!task) throw ParseError(line_no, "unknown task '" + std::string(value) + "'");
        log.meta.task = *task;
        have_task = true;
      } else if (key == "sample_rate") {
        const double rate = finite_number(value, line_no, key);
        if (rate <= 0.0) throw ParseError(line_no, "sample_rate must be positive");
        log.meta.sample_rate = rate;
        have_rate = true;
      } else if (key == "realism_rating") {
        const double rating = finite_number(value, line_no, key);
        if (rating < 0.0 || rating > 1.0) throw ParseError(line_no, "realism_rating outside [0, 1]");
        log.meta.realism_rating = rating;
      } else {
        log.meta.extra[key] = std::string(value);
      }
      continue;
    }

    if (!header_seen) {
      if (line != kDriveLogHeader) throw ParseError(line_no, "malformed header (expected '" + std::string(kDriveLogHeader) + "')");
      if (!have_driver || !have_env || !have_task || !have_rate) {
        throw ParseError(line_no, "malformed header: metadata requires driver_id, environment, task and sample_rate");
      }
      header_seen = true;
      continue;
    }

    const auto cells = split(line, ',');
    if (cells.size() != 8) throw ParseError(line_no, "expected 8 columns, found " + std::to_string(cells.size()));
    TrajectorySample s;
    s.t = finite_number(cells[0], line_no, "t");
    s.x = finite_number(cells[1], line_no, "x");
    s.y = finite_number(cells[2], line_no, "y");
    s.heading = finite_number(cells[3], line_no, "heading");
    s.speed = finite_number(cells[4], line_no, "speed");
    s.yaw_rate = optional_number(cells[5], line_no, "yaw_rate");
    s.lat_accel = optional_number(cells[6], line_no, "lat_accel");
    s.swa = finite_number(cells[7], line_no, "swa");
    if (s.speed < 0.0) throw ParseError(line_no, "negative speed");
    if (!log.samples.empty() && !(s.t > log.samples.back().t)) throw ParseError(line_no, "non-monotonic time");
    log.samples.push_back(s);
  }
  if (!header_seen) throw ParseError(line_no + 1, "malformed header (missing)");
  return log;
}

DriveLog parse_drive_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_drive_log(in);
}

void write_drive_log(std::ostream& out, const DriveLog& log) {
  out << "# driver_id=" << log.meta.driver_id << '\n';
  out << "# environment=" << to_string(log.meta.environment) << '\n';
  out << "# task=" << to_string(log.meta.task) << '\n';
  out << "# sample_rate=" << format_number(log.meta.sample_rate) << '\n';
  if (log.meta.realism_rating) out << "# realism_rating=" << format_number(*log.meta.realism_rating) << '\n';
  for (const auto& [key, value] : log.meta.extra) out << "# " << key << '=' << value << '\n';
  out << kDriveLogHeader << '\n';
  for (const auto& s : log.samples) {
    out << format_number(s.t) << ',' << format_number(s.x) << ',' << format_number(s.y) << ','
        << format_number(s.heading) << ',' << format_number(s.speed) << ',';
    if (s.yaw_rate) out << format_number(*s.yaw_rate);
    out << ',';
    if (s.lat_accel) out << format_number(*s.lat_accel);
    out << ',' << format_number(s.swa) << '\n';
  }
}

std::string write_drive_log(const DriveLog& log) {
  std::ostringstream out;
  write_drive_log(out, log);
  return out.str();
}

std::vector<double> decode_event_times(std::string_view text) {
  std::vector<double> times;
  text = trim(text);
  if (text.empty()) return times;
  for (auto part : split(text, ';')) {
    auto v = to_double(part);
    if (!v || !std::isfinite(*v)) throw ParseError(0, "malformed event time '" + std::string(part) + "'");
    times.push_back(*v);
  }
  return times;
}

std::string encode_event_times(const std::vector<double>& times) {
  std::string out;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i) out += ';';
    out += format_number(times[i]);
  }
  return out;
}

}  // namespace fidelity
