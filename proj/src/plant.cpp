#include "hgsim/plant.hpp"

#include <cmath>
#include <string>

#include "hgsim/errors.hpp"

namespace hgsim {

void VehicleParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError(std::string("vehicle parameter ") + name +
                              " must be positive, got " + std::to_string(v));
    };
    positive(m, "m");
    positive(I, "I");
    positive(l_f, "l_f");
    positive(l_r, "l_r");
    positive(K_f, "K_f");
    positive(K_r, "K_r");
    positive(v, "v");
    positive(E_t, "E_t");
    positive(K_s, "K_s");
    positive(K_t, "K_t");
    positive(J_s, "J_s");
    positive(B_s, "B_s");
}

VehicleParams vehicle_preset_default() {
    VehicleParams p;
    p.m = 1100.0;
    p.I = 2940.0;
    p.l_f = 1.0;
    p.l_r = 1.635;
    p.K_f = 53300.0;
    p.K_r = 117000.0;
    p.v = 60.0 / 3.6;
    p.E_t = 0.026;
    p.K_s = 48510.0;
    p.K_t = 1.0 / 17.0;
    p.J_s = 0.11;
    p.B_s = 0.57;
    return p;
}

double aligning_coefficient(const VehicleParams& p) {
    return 2.0 * p.E_t * p.K_f * p.K_t / (1.0 + 2.0 * p.E_t * p.K_f / p.K_s);
}

double aligning_torque(const VehicleParams& p, double beta, double r, double delta) {
    return aligning_coefficient(p) * (beta + p.l_f * r / p.v - delta);
}

void lateral_dynamics(const VehicleParams& p, double beta, double r, double delta,
                      double& beta_dot, double& r_dot) {
    //   m v (dbeta/dt + r) = 2 K_f (delta - beta - l_f r / v) + 2 K_r (-beta + l_r r / v)
    //   I dr/dt = 2 l_f K_f (delta - beta - l_f r / v) - 2 l_r K_r (-beta + l_r r / v)
    beta_dot = (2.0 * p.K_f * delta - 2.0 * (p.K_f + p.K_r) * beta -
                (p.m * p.v + 2.0 * (p.l_f * p.K_f - p.l_r * p.K_r) / p.v) * r) /
               (p.m * p.v);
    r_dot = (2.0 * p.l_f * p.K_f * delta - 2.0 * (p.l_f * p.K_f - p.l_r * p.K_r) * beta -
             2.0 * (p.l_f * p.l_f * p.K_f + p.l_r * p.l_r * p.K_r) * r / p.v) /
            p.I;
}

PlantState plant_derivative(const VehicleParams& p, const PlantState& s,
                            const PlantInputs& u) {
    const double delta = p.K_t * s.phi;

    PlantState d;
    lateral_dynamics(p, s.beta, s.r, delta, d.beta, d.r);

    const double T_a = aligning_torque(p, s.beta, s.r, delta);
    d.phi = s.phi_dot;
    d.phi_dot = (u.T_d + u.T_h + u.T_ext + T_a - p.B_s * s.phi_dot) / p.J_s;

    d.X = p.v * std::cos(s.psi + s.beta);
    d.Y = p.v * std::sin(s.psi + s.beta);
    d.psi = s.r;
    return d;
}

}  // namespace hgsim
