#include "fidelity/cueing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <sstream>

#include "fidelity/errors.hpp"
#include "fidelity/kinematics.hpp"
#include "fidelity/signal.hpp"

namespace fidelity {

void CueingParams::validate() const {
  if (!(scale > 0.0 && scale <= 1.0)) throw ValidationError("cueing scale must be in (0, 1]");
  for (double v : {hp_frequency, hp_damping, hp_residual_frequency, tilt_frequency, tilt_rate_limit, angular_frequency,
                   limit_xy, limit_heave, limit_angle}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("cueing frequencies and limits must be positive");
  }
}

namespace {

/// Output is the first derivative of q, where den(D) q = input and
/// den is monic of degree N. The transfer is s / den(s).
template <std::size_t N>
class DerivativeFilter {
 public:
  explicit DerivativeFilter(std::array<double, N> coeffs) : c_(coeffs) {}  // den = s^N + c[N-1] s^(N-1) + ... + c[0]

  double step(double input, double dt) {
    auto f = [&](const std::array<double, N>& s) {
      std::array<double, N> d{};
      for (std::size_t i = 0; i + 1 < N; ++i) d[i] = s[i + 1];
      double top = input;
      for (std::size_t i = 0; i < N; ++i) top -= c_[i] * s[i];
      d[N - 1] = top;
      return d;
    };
    auto axpy = [](const std::array<double, N>& a, const std::array<double, N>& b, double h) {
      std::array<double, N> r{};
      for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + h * b[i];
      return r;
    };
    const auto k1 = f(s_);
    const auto k2 = f(axpy(s_, k1, dt / 2));
    const auto k3 = f(axpy(s_, k2, dt / 2));
    const auto k4 = f(axpy(s_, k3, dt));
    for (std::size_t i = 0; i < N; ++i) s_[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return s_[1];
  }

 private:
  std::array<double, N> c_;
  std::array<double, N> s_{};
};

DerivativeFilter<3> translational(const CueingParams& p) {
  // (s^2 + 2 zeta w s + w^2)(s + w1)
  const double w = p.hp_frequency, z = p.hp_damping, w1 = p.hp_residual_frequency;
  return DerivativeFilter<3>({w * w * w1, w * w + 2 * z * w * w1, 2 * z * w + w1});
}

DerivativeFilter<2> rotational(const CueingParams& p) {
  const double w = p.angular_frequency;
  return DerivativeFilter<2>({w * w, 2 * w});
}

class TiltChannel {
 public:
  explicit TiltChannel(const CueingParams& p) : p_(&p) {}

  double step(double specific_force, double dt) {
    filtered_ += dt * p_->tilt_frequency * (p_->scale * specific_force - filtered_);
    const double target = std::asin(std::clamp(filtered_ / kGravity, -1.0, 1.0));
    const double max_step = p_->tilt_rate_limit * dt;
    angle_ += std::clamp(target - angle_, -max_step, max_step);
    return angle_;
  }

 private:
  const CueingParams* p_;
  double filtered_ = 0.0;
  double angle_ = 0.0;
};

double clamp_flag(double v, double limit, std::uint32_t bit, std::uint32_t& flags) {
  if (v > limit) {
    flags |= bit;
    return limit;
  }
  if (v < -limit) {
    flags |= bit;
    return -limit;
  }
  return v;
}

}  // namespace

std::vector<PlatformPose> motion_cueing(const std::vector<BodyMotion>& input, const CueingParams& params) {
  params.validate();
  std::vector<PlatformPose> out;
  out.reserve(input.size());
  auto fx = translational(params), fy = translational(params), fz = translational(params);
  auto froll = rotational(params), fpitch = rotational(params), fyaw = rotational(params);
  TiltChannel tilt_roll(params), tilt_pitch(params);

  for (std::size_t i = 0; i < input.size(); ++i) {
    const BodyMotion& m = input[i];
    PlatformPose pose;
    pose.t = m.t;
    if (i > 0) {
      const double dt = m.t - input[i - 1].t;
      if (!(dt > 0.0)) throw ValidationError("cueing input must have increasing time");
      const BodyMotion& u = input[i - 1];  // zero-order hold on the previous sample
      pose.x = fx.step(params.scale * u.ax, dt);
      pose.y = fy.step(params.scale * u.ay, dt);
      pose.z = fz.step(params.scale * u.az, dt);
      // Lateral force to the left is rendered by rolling right; forward force by pitching up.
      pose.roll = -tilt_roll.step(u.ay, dt) + froll.step(params.scale * u.roll_rate, dt);
      pose.pitch = tilt_pitch.step(u.ax, dt) + fpitch.step(params.scale * u.pitch_rate, dt);
      pose.yaw = fyaw.step(params.scale * u.yaw_rate, dt);
    }
    pose.x = clamp_flag(pose.x, params.limit_xy, kLimitX, pose.limit_flags);
    pose.y = clamp_flag(pose.y, params.limit_xy, kLimitY, pose.limit_flags);
    pose.z = clamp_flag(pose.z, params.limit_heave, kLimitZ, pose.limit_flags);
    pose.roll = clamp_flag(pose.roll, params.limit_angle, kLimitRoll, pose.limit_flags);
    pose.pitch = clamp_flag(pose.pitch, params.limit_angle, kLimitPitch, pose.limit_flags);
    pose.yaw = clamp_flag(pose.yaw, params.limit_angle, kLimitYaw, pose.limit_flags);
    out.push_back(pose);
  }
  return out;
}

std::vector<BodyMotion> body_motion_from_log(const DriveLog& log) {
  const DriveLog full = derive_kinematics(is_uniform(log) ? log : resample_uniform(log, log.meta.sample_rate));
  std::vector<double> speed;
  speed.reserve(full.samples.size());
  for (const auto& s : full.samples) speed.push_back(s.speed);
  const auto accel = central_difference(speed, 1.0 / full.meta.sample_rate);
  std::vector<BodyMotion> out(full.samples.size());
  for (std::size_t i = 0; i < full.samples.size(); ++i) {
    out[i].t = full.samples[i].t;
    out[i].ax = accel[i];
    out[i].ay = full.samples[i].lat_accel.value_or(0.0);
    out[i].yaw_rate = full.samples[i].yaw_rate.value_or(0.0);
  }
  return out;
}

void write_cueing(std::ostream& out, const std::vector<PlatformPose>& poses) {
  out << "t,x,y,z,roll,pitch,yaw,limit_flags\n";
  for (const auto& p : poses) {
    out << format_number(p.t) << ',' << format_number(p.x) << ',' << format_number(p.y) << ',' << format_number(p.z)
        << ',' << format_number(p.roll) << ',' << format_number(p.pitch) << ',' << format_number(p.yaw) << ','
        << p.limit_flags << '\n';
  }
}

std::string write_cueing(const std::vector<PlatformPose>& poses) {
  std::ostringstream out;
  write_cueing(out, poses);
  return out.str();
}

}  // namespace fidelity
