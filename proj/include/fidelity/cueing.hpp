#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fidelity/types.hpp"

namespace fidelity {

struct CueingParams {
  double scale = 0.5;                 // translational and angular motion scaling, (0, 1]
  double hp_frequency = 1.0;          // rad/s, second-order washout per axis
  double hp_damping = 1.0;
  double hp_residual_frequency = 1.0; // rad/s, extra first-order stage that removes the position offset
  double tilt_frequency = 0.5;        // rad/s, tilt-coordination low-pass
  double tilt_rate_limit = 3.0 * 3.14159265358979323846 / 180.0;  // rad/s
  double angular_frequency = 1.0;     // rad/s, rotational washout
  double limit_xy = 2.5;              // m
  double limit_heave = 0.25;          // m
  double limit_angle = 20.0 * 3.14159265358979323846 / 180.0;  // rad

  /// Throws ValidationError unless scale is in (0, 1] and every frequency and limit is positive.
  void validate() const;
};

/// Vehicle-frame specific force (gravity removed) and angular rates.
struct BodyMotion {
  double t = 0.0;
  double ax = 0.0, ay = 0.0, az = 0.0;                    // m/s^2
  double roll_rate = 0.0, pitch_rate = 0.0, yaw_rate = 0.0;  // rad/s
};

enum LimitFlag : std::uint32_t {
  kLimitX = 1u << 0,
  kLimitY = 1u << 1,
  kLimitZ = 1u << 2,
  kLimitRoll = 1u << 3,
  kLimitPitch = 1u << 4,
  kLimitYaw = 1u << 5,
};

struct PlatformPose {
  double t = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;
  double roll = 0.0, pitch = 0.0, yaw = 0.0;
  std::uint32_t limit_flags = 0;
};

/// Classical washout. Translation: high-passed scaled specific force,
/// double-integrated; a step input returns to neutral. Tilt: low-passed
/// sustained specific force mapped to roll/pitch, rate-limited. Rotation:
/// high-passed scaled angular rates. Outputs are clamped to the platform
/// limits with a flag bit per clamped channel. Input must be uniformly sampled.
std::vector<PlatformPose> motion_cueing(const std::vector<BodyMotion>& input, const CueingParams& params = {});

/// Body motion implied by a drive log: ax from the speed derivative, ay from
/// lat_accel, yaw rate from the log (derived when absent).
std::vector<BodyMotion> body_motion_from_log(const DriveLog& log);

void write_cueing(std::ostream& out, const std::vector<PlatformPose>& poses);
std::string write_cueing(const std::vector<PlatformPose>& poses);

}  // namespace fidelity
