#pragma once

namespace hgsim {

// Vehicle, tire and steering-column parameters.  SI units throughout.
struct VehicleParams {
    double m;    // vehicle mass, kg
    double I;    // yaw moment of inertia, kg m^2
    double l_f;  // CG to front axle, m
    double l_r;  // CG to rear axle, m
    double K_f;  // front cornering stiffness per tire, N/rad
    double K_r;  // rear cornering stiffness per tire, N/rad
    double v;    // constant forward speed, m/s
    double E_t;  // tire caster (pneumatic trail factor), m
    double K_s;  // steering system stiffness, N m/rad
    double K_t;  // steering gear ratio (front wheel angle per wheel angle)
    double J_s;  // steering wheel + column inertia, kg m^2
    double B_s;  // steering column viscous damping, N m s/rad

    // Throws ConfigError when any mass/inertia/geometry/stiffness/speed entry
    // is non-positive or non-finite.
    void validate() const;
};

// Identified passenger-car set: 60 km/h, 1100 kg, gear ratio 1/17.
VehicleParams vehicle_preset_default();

// Full rigid-body state of vehicle plus steering column.
struct PlantState {
    double X;        // world position, m
    double Y;        // world position, m
    double psi;      // heading, rad
    double beta;     // body slip angle, rad
    double r;        // yaw rate, rad/s
    double phi;      // steering wheel angle, rad
    double phi_dot;  // steering wheel rate, rad/s
};

// Torques applied to the steering column.
struct PlantInputs {
    double T_d;    // driver (neuromuscular) torque, N m
    double T_h;    // haptic guidance torque, N m
    double T_ext;  // external disturbance torque, N m
};

// Self-aligning stiffness: the tire aligning moment reflected to the
// steering wheel through the gear and the steering system compliance.
double aligning_coefficient(const VehicleParams& p);

// Self-aligning torque on the steering wheel for the current slip state and
// front wheel angle delta.  Restoring: a pure wheel angle yields a torque of
// the opposite sign.
double aligning_torque(const VehicleParams& p, double beta, double r, double delta);

// Lateral (slip/yaw) dynamics of the linear bicycle model.
void lateral_dynamics(const VehicleParams& p, double beta, double r, double delta,
                      double& beta_dot, double& r_dot);

// Complete state derivative: lateral dynamics, steering column driven by the
// torque sum (driver + haptic + external + self-aligning), and world-frame
// pose kinematics.  Returned in a PlantState-shaped struct (field k holds
// d(state.k)/dt).
PlantState plant_derivative(const VehicleParams& p, const PlantState& s,
                            const PlantInputs& u);

}  // namespace hgsim
