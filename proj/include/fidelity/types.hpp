#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fidelity {

enum class Environment { Real, Std, NoTrq, NoMot };
enum class TaskKind { Lct, Slx, Clv };

std::string_view to_string(Environment env);
std::string_view to_string(TaskKind task);
std::optional<Environment> parse_environment(std::string_view text);
std::optional<TaskKind> parse_task(std::string_view text);

inline constexpr Environment kAllEnvironments[] = {Environment::Real, Environment::Std,
                                                   Environment::NoTrq, Environment::NoMot};
inline constexpr TaskKind kAllTasks[] = {TaskKind::Lct, TaskKind::Slx, TaskKind::Clv};

/// One vehicle-state sample. Angles in radians, heading CCW from +X,
/// rightward steering negative. yaw_rate, lat_accel and sw_rate may be
/// absent in source logs; derive_kinematics fills them in.
struct TrajectorySample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
  std::optional<double> yaw_rate;
  std::optional<double> lat_accel;
  double swa = 0.0;
  std::optional<double> sw_rate;
};

struct LogMeta {
  std::string driver_id;
  Environment environment = Environment::Real;
  TaskKind task = TaskKind::Lct;
  double sample_rate = 100.0;
  std::optional<double> realism_rating;
  /// Additional `# key=value` entries (attempt metadata, cone hit events).
  std::map<std::string, std::string> extra;
};

struct DriveLog {
  LogMeta meta;
  std::vector<TrajectorySample> samples;
};

}  // namespace fidelity
