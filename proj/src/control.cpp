#include "servo/control.hpp"

#include <algorithm>
#include <cmath>

#include "servo/errors.hpp"

namespace servo {

void PiGains::validate() const {
  for (double g : {kp_x, ki_x, kp_theta, ki_theta}) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw ConfigError("gains must be >= 0 and finite");
    }
  }
  if (!(integral_clamp_x > 0.0) || !(integral_clamp_theta > 0.0)) {
    throw ConfigError("gains.integral_clamp must be > 0");
  }
}

PiOutput pi_control(const EdgePose& estimate, const ReferencePose& reference,
                    const PiGains& gains, const PiState& state,
                    double tangential_step_mm) {
  const double e_x = reference.x_mm - estimate.x_mm;
  const double e_theta = reference.theta_deg - estimate.theta_deg;

  PiState next;
  next.integral_x = std::clamp(state.integral_x + e_x,
                               -gains.integral_clamp_x, gains.integral_clamp_x);
  next.integral_theta =
      std::clamp(state.integral_theta + e_theta, -gains.integral_clamp_theta,
                 gains.integral_clamp_theta);

  ControlCommand cmd;
  cmd.d_normal_mm = std::clamp(gains.kp_x * e_x + gains.ki_x * next.integral_x,
                               -kXRangeMm, kXRangeMm);
  cmd.d_yaw_deg =
      std::clamp(gains.kp_theta * e_theta + gains.ki_theta * next.integral_theta,
                 -kThetaRangeDeg, kThetaRangeDeg);
  cmd.d_tangent_mm = tangential_step_mm;
  return {cmd, next};
}

Frame2 to_base_frame(const ControlCommand& command, const Frame2& sensor) {
  // Rotation first, so the tangential step follows the corrected heading.
  const double heading = wrap_angle(sensor.heading + deg_to_rad(command.d_yaw_deg));
  const Point2 along{std::cos(heading), std::sin(heading)};
  const Point2 outward{std::sin(heading), -std::cos(heading)};
  return {sensor.origin + command.d_tangent_mm * along +
              command.d_normal_mm * outward,
          heading};
}

}  // namespace servo
