#pragma once

#include <string>

#include "hgsim/course.hpp"

namespace hgsim {

// Haptic guidance controller parameters.  The guidance runs its own two-point
// preview (primed look-ahead times), independent of the driver's.
struct HapticParams {
    double a1p;  // lateral error gain, N m/m
    double a2p;  // lateral error rate gain, N m s/m
    double a3p;  // heading error gain, N m/rad
    double a4p;  // heading error rate gain, N m s/rad
    double K1;   // overall assistance gain (0 = off, 1 = full authority)
    double t_n;  // near-point look-ahead, s
    double t_f;  // far-point look-ahead, s
    double torque_limit;  // clamp on |T_h|, N m

    void validate() const;  // throws ConfigError
};

enum class GuidanceLevel { none, normal, strong, full };

GuidanceLevel guidance_level_from_string(const std::string& name);
std::string to_string(GuidanceLevel level);

// Guidance torque from the guidance's own preview errors and their rates.
// Same negative-feedback orientation as the driver: lateral terms (left-
// positive) negated, heading terms (target-minus-actual) positive.  Clamped
// to +-torque_limit.
double haptic_torque(const HapticParams& hp, const PreviewErrors& e,
                     double e_y_dot, double e_theta_dot);

// Copy of base with K1 set by the assistance level:
// none 0, normal 0.25, strong 0.5, full 1.0.
HapticParams guidance_level(HapticParams base, GuidanceLevel level);

// Named gain sets.  "ch4" is the identified set (K1 = 0.25); "exp1", "exp2"
// and "exp3" are the three experimental-study sets.  All share the 0.3 s /
// 0.7 s look-ahead pair and the 5 N m clamp.
HapticParams haptic_preset(const std::string& name);

}  // namespace hgsim
