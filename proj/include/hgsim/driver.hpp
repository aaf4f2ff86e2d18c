#pragma once

#include <string>
#include <utility>

#include "hgsim/course.hpp"

namespace hgsim {

// Two-point preview driver parameters.  With the far point enabled the
// heading term a4*e_theta anticipates curvature; with it disabled (degraded
// vision) the derivative term a3*de_y/dt substitutes for the missing preview.
struct DriverParams {
    double a1;   // lateral error gain, rad/m
    double a2;   // lateral error integral gain, rad/(m s)
    double a3;   // lateral error rate gain, rad s/m (low-visibility mode only)
    double a4;   // far-point heading error gain, rad/rad
    double t_n;  // near-point look-ahead, s
    double t_f;  // far-point look-ahead, s
    double t_p;  // processing delay, s
    bool far_point_enabled;

    void validate() const;  // throws ConfigError
};

// Neuromuscular / torque-generation parameters.
struct NeuromuscularParams {
    double K_d;    // drive stiffness, N m/rad
    double K_hf;   // haptic feedback compensation gain (reliance), 0..1
    double K_nms;  // arm stiffness, N m/rad
    double t_nms;  // neuromuscular lag, s

    void validate() const;  // throws ConfigError
};

// Internal driver states.  e_y_prev is the previous-step near-point error
// kept for the backward-difference rate used in low-visibility mode.
struct DriverState {
    double x_int = 0.0;    // integral of e_y
    double x_pade = 0.0;   // processing-delay state
    double x_nms = 0.0;    // produced torque T_d
    double e_y_prev = 0.0;
};

// Pre-delay steering wheel angle command from the preview errors.  Every
// channel is negative feedback on the vehicle's displacement from the lane:
// the lateral terms (error measured left-positive) enter negated, the
// heading term (road tangent minus heading, i.e. already a target-minus-
// actual quantity) enters with positive gain.  Exactly one of the a3/a4
// channels is active, selected by far_point_enabled.
double visual_command(const DriverParams& dp, const PreviewErrors& e,
                      double e_y_dot, const DriverState& ds);

// First-order Pade approximation of the processing delay exp(-t_p s):
//   dx/dt = (2/t_p) (u - x),   y = 2 x - u
// Unity DC gain; a step into a zeroed state first appears inverted (y = -u).
double pade_output(const DriverParams& dp, const DriverState& ds, double u_pre);

// Advance the delay state one step of length dt (RK4, input held).  Returns
// the delayed command at the end of the step and the updated state.
// Requires dt <= t_p / 10.
std::pair<double, DriverState> pade_delay_step(const DriverParams& dp,
                                               const DriverState& ds,
                                               double u_pre, double dt);

// Advance the torque state one step (RK4, inputs held).  The target torque
//   T* = (K_d + K_nms) phi_target - K_nms phi - K_hf T_h
// is tracked through a first-order lag t_nms; the produced torque is the
// state itself.  Returns (T_d at end of step, updated state).
std::pair<double, DriverState> neuromuscular_step(const NeuromuscularParams& np,
                                                  const DriverState& ds,
                                                  double phi_target, double phi,
                                                  double T_h, double dt);

// Inputs held constant while evaluating the continuous driver dynamics.
struct DriverInputs {
    double e_y;
    double e_theta;
    double e_y_dot;
    double phi;
    double T_h;
};

// Time derivative of the three dynamic driver states (e_y_prev is bookkeeping
// and gets derivative 0).  This must agree with the chained per-step blocks
// above; the identification state-space realizes the same dynamics.
DriverState driver_derivative(const DriverParams& dp, const NeuromuscularParams& np,
                              const DriverState& ds, const DriverInputs& in);

// Vision-condition presets: "normal", "low_visibility", "declined_attention".
DriverParams driver_preset(const std::string& name);

// Torque-generation presets: "manual", "assisted".
NeuromuscularParams neuromuscular_preset(const std::string& name);

}  // namespace hgsim
