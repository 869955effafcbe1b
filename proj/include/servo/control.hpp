#pragma once

#include "servo/geometry.hpp"

namespace servo {

struct PiGains {
  double kp_x{0.5};
  double ki_x{0.05};
  double kp_theta{0.5};
  double ki_theta{0.05};
  double integral_clamp_x{2.0};
  double integral_clamp_theta{2.0};

  void validate() const;
};

/// Reference contact pose the controller regulates to.
struct ReferencePose {
  double x_mm{0.0};
  double theta_deg{0.0};
};

/// Per-step motion command in the sensor frame. Corrections are saturated to
/// the sensor's valid range; the tangential advance is the fixed step length.
struct ControlCommand {
  double d_normal_mm{};
  double d_yaw_deg{};
  double d_tangent_mm{};
};

struct PiState {
  double integral_x{};
  double integral_theta{};
};

struct PiOutput {
  ControlCommand command;
  PiState state;
};

/// e = ref - estimate per parameter; integrator accumulates e with anti-windup
/// clamping; output kp*e + ki*integral, saturated.
PiOutput pi_control(const EdgePose& estimate, const ReferencePose& reference,
                    const PiGains& gains, const PiState& state,
                    double tangential_step_mm);

/// Apply a command in the world frame. The yaw correction rotates the frame
/// first; the tangential and normal displacements then follow the corrected
/// heading. The normal axis points outward (heading rotated -90 degrees),
/// consistent with the outward-positive sign of EdgePose::x_mm.
Frame2 to_base_frame(const ControlCommand& command, const Frame2& sensor);

}  // namespace servo
