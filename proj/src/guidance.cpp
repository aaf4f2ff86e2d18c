#include "hgsim/guidance.hpp"

#include <algorithm>
#include <cmath>

#include "hgsim/errors.hpp"

namespace hgsim {

void HapticParams::validate() const {
    if (!(torque_limit > 0.0)) throw ConfigError("haptic torque limit must be positive");
    if (!(K1 >= 0.0)) throw ConfigError("haptic K1 must be >= 0");
    if (!(t_n > 0.0) || !(t_f > t_n))
        throw ConfigError("haptic look-aheads must satisfy 0 < t_n < t_f");
    for (double g : {a1p, a2p, a3p, a4p})
        if (!std::isfinite(g)) throw ConfigError("haptic gains must be finite");
}

GuidanceLevel guidance_level_from_string(const std::string& name) {
    if (name == "none") return GuidanceLevel::none;
    if (name == "normal") return GuidanceLevel::normal;
    if (name == "strong") return GuidanceLevel::strong;
    if (name == "full") return GuidanceLevel::full;
    throw ConfigError("unknown guidance level '" + name + "'");
}

std::string to_string(GuidanceLevel level) {
    switch (level) {
        case GuidanceLevel::none: return "none";
        case GuidanceLevel::normal: return "normal";
        case GuidanceLevel::strong: return "strong";
        case GuidanceLevel::full: return "full";
    }
    return "none";
}

double haptic_torque(const HapticParams& hp, const PreviewErrors& e,
                     double e_y_dot, double e_theta_dot) {
    const double raw = hp.K1 * (-hp.a1p * e.e_y - hp.a2p * e_y_dot +
                                hp.a3p * e.e_theta + hp.a4p * e_theta_dot);
    return std::clamp(raw, -hp.torque_limit, hp.torque_limit);
}

HapticParams guidance_level(HapticParams base, GuidanceLevel level) {
    switch (level) {
        case GuidanceLevel::none: base.K1 = 0.0; break;
        case GuidanceLevel::normal: base.K1 = 0.25; break;
        case GuidanceLevel::strong: base.K1 = 0.5; break;
        case GuidanceLevel::full: base.K1 = 1.0; break;
    }
    return base;
}

HapticParams haptic_preset(const std::string& name) {
    HapticParams p{};
    p.t_n = 0.3;
    p.t_f = 0.7;
    p.torque_limit = 5.0;
    if (name == "ch4") {
        p.a1p = 1.9;
        p.a2p = 0.05;
        p.a3p = 38.0;
        p.a4p = 1.9;
        p.K1 = 0.25;
    } else if (name == "exp1") {
        p.a1p = 1.9;
        p.a2p = 0.0;  // unspecified in the source gain set; taken as 0
        p.a3p = 38.0;
        p.a4p = 1.9;
        p.K1 = 0.25;
    } else if (name == "exp2") {
        p.a1p = 3.2;
        p.a2p = 0.08;
        p.a3p = 20.0;
        p.a4p = 0.50;
        p.K1 = 0.25;
    } else if (name == "exp3") {
        p.a1p = 0.16;
        p.a2p = 0.004;
        p.a3p = 1.8;
        p.a4p = 0.045;
        p.K1 = 1.0;
    } else {
        throw ConfigError("unknown haptic preset '" + name + "'");
    }
    return p;
}

}  // namespace hgsim
