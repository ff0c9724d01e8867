#pragma once

#include "fidelity/types.hpp"

namespace fidelity {

/// Canonical analysis rate.
inline constexpr double kCanonicalRate = 100.0;
/// Default centred smoothing window applied before differencing.
inline constexpr double kDefaultSmoothWindow = 0.1;

/// Linearly interpolates every field onto stamps t_first + k/rate within
/// [t_first, t_last]. Heading follows the shortest arc between neighbours (the
/// result is continuous, not wrapped). Optional fields stay present only when
/// both neighbours carry them. Throws ValidationError for < 2 samples or rate <= 0.
DriveLog resample_uniform(const DriveLog& log, double rate);

/// True when consecutive stamps differ from 1/sample_rate by at most `tol` seconds.
bool is_uniform(const DriveLog& log, double tol = 1e-9);

/// Fills absent yaw_rate (smoothed central difference of unwrapped heading),
/// lat_accel (speed * yaw_rate) and sw_rate (smoothed central difference of
/// swa). Present values are never overwritten. Throws ValidationError for
/// non-uniform sampling.
DriveLog derive_kinematics(const DriveLog& log, double smooth_window = kDefaultSmoothWindow);

}  // namespace fidelity
