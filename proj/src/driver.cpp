#include "hgsim/driver.hpp"

#include <cassert>
#include <cmath>

#include "hgsim/errors.hpp"

namespace hgsim {

void DriverParams::validate() const {
    if (!(t_n > 0.0)) throw ConfigError("driver t_n must be positive");
    if (far_point_enabled && !(t_f > t_n))
        throw ConfigError("driver t_f must exceed t_n when the far point is enabled");
    if (!(t_p > 0.0)) throw ConfigError("driver t_p must be positive");
    for (double g : {a1, a2, a3, a4})
        if (!std::isfinite(g)) throw ConfigError("driver gains must be finite");
}

void NeuromuscularParams::validate() const {
    if (!(t_nms > 0.0)) throw ConfigError("neuromuscular t_nms must be positive");
    if (!(K_nms >= 0.0) || !(K_d >= 0.0)) throw ConfigError("neuromuscular stiffnesses must be >= 0");
    if (!(K_hf >= 0.0 && K_hf <= 1.0))
        throw ConfigError("neuromuscular K_hf must lie in [0, 1], got " + std::to_string(K_hf));
}

double visual_command(const DriverParams& dp, const PreviewErrors& e,
                      double e_y_dot, const DriverState& ds) {
    double u = -(dp.a1 * e.e_y + dp.a2 * ds.x_int);
    if (dp.far_point_enabled)
        u += dp.a4 * e.e_theta;
    else
        u -= dp.a3 * e_y_dot;
    return u;
}

double pade_output(const DriverParams& dp, const DriverState& ds, double u_pre) {
    (void)dp;
    return 2.0 * ds.x_pade - u_pre;
}

std::pair<double, DriverState> pade_delay_step(const DriverParams& dp,
                                               const DriverState& ds,
                                               double u_pre, double dt) {
    assert(dt <= dp.t_p / 10.0 && "integration step too coarse for the delay");
    const double c = 2.0 / dp.t_p;
    auto f = [&](double x) { return c * (u_pre - x); };
    const double x = ds.x_pade;
    const double k1 = f(x);
    const double k2 = f(x + 0.5 * dt * k1);
    const double k3 = f(x + 0.5 * dt * k2);
    const double k4 = f(x + dt * k3);
    DriverState out = ds;
    out.x_pade = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return {pade_output(dp, out, u_pre), out};
}

std::pair<double, DriverState> neuromuscular_step(const NeuromuscularParams& np,
                                                  const DriverState& ds,
                                                  double phi_target, double phi,
                                                  double T_h, double dt) {
    const double target =
        (np.K_d + np.K_nms) * phi_target - np.K_nms * phi - np.K_hf * T_h;
    auto f = [&](double x) { return (target - x) / np.t_nms; };
    const double x = ds.x_nms;
    const double k1 = f(x);
    const double k2 = f(x + 0.5 * dt * k1);
    const double k3 = f(x + 0.5 * dt * k2);
    const double k4 = f(x + dt * k3);
    DriverState out = ds;
    out.x_nms = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return {out.x_nms, out};
}

DriverState driver_derivative(const DriverParams& dp, const NeuromuscularParams& np,
                              const DriverState& ds, const DriverInputs& in) {
    const double u_pre =
        visual_command(dp, {in.e_y, in.e_theta}, in.e_y_dot, ds);
    const double phi_target = pade_output(dp, ds, u_pre);
    const double target =
        (np.K_d + np.K_nms) * phi_target - np.K_nms * in.phi - np.K_hf * in.T_h;

    DriverState d;
    d.x_int = in.e_y;
    d.x_pade = (2.0 / dp.t_p) * (u_pre - ds.x_pade);
    d.x_nms = (target - ds.x_nms) / np.t_nms;
    d.e_y_prev = 0.0;
    return d;
}

DriverParams driver_preset(const std::string& name) {
    DriverParams p{};
    p.a1 = 0.1;
    p.a2 = 0.05;
    p.t_n = 0.3;
    p.t_p = 0.1;
    if (name == "normal") {
        p.a3 = 0.0;
        p.a4 = 3.7;
        p.t_f = 1.0;
        p.far_point_enabled = true;
    } else if (name == "low_visibility") {
        p.a3 = 0.3;
        p.a4 = 0.0;
        p.t_f = 0.0;
        p.far_point_enabled = false;
    } else if (name == "declined_attention") {
        p.a3 = 0.0;
        p.a4 = 3.7;
        p.t_f = 1.0;
        p.t_p = 0.5;
        p.far_point_enabled = true;
    } else {
        throw ConfigError("unknown driver preset '" + name + "'");
    }
    return p;
}

NeuromuscularParams neuromuscular_preset(const std::string& name) {
    NeuromuscularParams p{};
    p.K_nms = 1.0;
    p.t_nms = 0.1;
    if (name == "manual") {
        p.K_d = 3.8;
        p.K_hf = 0.0;
    } else if (name == "assisted") {
        p.K_d = 3.2;
        p.K_hf = 0.5;
    } else {
        throw ConfigError("unknown neuromuscular preset '" + name + "'");
    }
    return p;
}

}  // namespace hgsim
