#pragma once

// Grey-box identification of driver-model parameters from logged data.
//
// The driver + neuromuscular blocks (normal vision, far point enabled) are
// rewritten as a structured 3-state LTI realization with
//   states  x1 = integral of e_y, x2 = processing-delay state, x3 = T_d
//   inputs  u  = [e_y, e_theta, phi, T_h]
//   outputs y  = [T_d, phi_target]
// and the free parameters theta = {a1, a2, a4, t_p, K_d, K_hf} are fitted by
// minimizing the weighted sum of squared prediction errors over both output
// channels (damped Gauss-Newton with finite-difference Jacobians, parameters
// projected onto their bounds, multi-start to guard against local minima).

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hgsim {

// Free parameter vector. Ordering is fixed and shared by bounds, Jacobians
// and the multi-start sampler: [a1, a2, a4, t_p, K_d, K_hf].
struct IdentTheta {
    double a1 = 0.1;    // near-point proportional gain [1/s]
    double a2 = 0.01;   // near-point integral gain [1/s^2]
    double a4 = 3.7;    // far-point proportional gain [-]
    double t_p = 0.1;   // processing delay [s]
    double K_d = 3.0;   // neuromuscular stiffness [N.m/rad]
    double K_hf = 0.5;  // haptic reliance factor [-]

    static constexpr int kCount = 6;
    static IdentTheta defaults() { return IdentTheta{}; }
    std::array<double, kCount> to_array() const;
    static IdentTheta from_array(const std::array<double, kCount>& v);
    static const std::array<const char*, kCount>& names();
};

// Per-parameter search box, same ordering as IdentTheta.
struct ParamBounds {
    std::array<double, IdentTheta::kCount> lo{};
    std::array<double, IdentTheta::kCount> hi{};

    static ParamBounds defaults();  // a1 [0,0.5], a2 [0,0.1], a4 [3,5],
                                    // t_p [0.01,0.3], K_d [1,5], K_hf [0,1]
    void validate() const;
    bool contains(const IdentTheta& t) const;
    IdentTheta project(const IdentTheta& t) const;
};

// Parameters held fixed during identification.
struct FixedNeuromuscular {
    double K_nms = 1.0;   // reflex stiffness [N.m/rad]
    double t_nms = 0.1;   // neuromuscular lag [s]
};

// Continuous or discrete LTI realization (the same container serves both;
// discretize() maps A,B to their zero-order-hold counterparts and keeps C,D).
struct StateSpace {
    Eigen::MatrixXd A;  // 3x3
    Eigen::MatrixXd B;  // 3x4
    Eigen::MatrixXd C;  // 2x3
    Eigen::MatrixXd D;  // 2x4
};

// Everything pem_fit needs: recorded series, initial guess, bounds, fixed
// parameters and output weighting.
struct IdentProblem {
    // Input series, equal lengths (>= 100 samples).
    std::vector<double> e_y;      // lane error at the near point [m]
    std::vector<double> e_theta;  // heading error at the far point [rad]
    std::vector<double> phi;      // measured steering wheel angle [rad]
    std::vector<double> T_h;      // guidance torque [N.m]
    // Measured output series, same length as the inputs.
    std::vector<double> T_d;       // driver torque [N.m]
    std::vector<double> phi_meas;  // stands in for the target wheel angle [rad]

    double sample_rate = 120.0;  // [Hz]
    IdentTheta theta0 = IdentTheta::defaults();
    ParamBounds bounds = ParamBounds::defaults();
    FixedNeuromuscular fixed{};
    // Channel weights (T_d, phi). Non-positive entries are replaced by the
    // inverse variance of the measured series so the two channels (N.m vs
    // rad) contribute on a common scale.
    std::array<double, 2> output_weights{0.0, 0.0};

    std::size_t size() const { return e_y.size(); }
    void validate() const;  // throws ConfigError on shape/bounds violations
};

// One accepted/rejected Gauss-Newton iteration, for the convergence trace.
struct IterRecord {
    int iter = 0;
    double loss = 0.0;       // loss after this iteration
    double lambda = 0.0;     // damping factor used
    double step_norm = 0.0;  // Euclidean norm of the accepted step (0 if rejected)
    bool accepted = false;
};

struct IdentResult {
    IdentTheta theta_hat;
    double fit_Td = 0.0;   // [%] per-channel fit, 100*(1 - |y-yhat|/|y-mean(y)|)
    double fit_phi = 0.0;  // [%]
    int iterations = 0;
    bool converged = false;
    double final_loss = 0.0;
    int best_start = 0;                // index of the winning start
    std::vector<IterRecord> trace;     // trace of the winning start
    std::vector<double> pred_Td;       // model outputs at theta_hat
    std::vector<double> pred_phi;
};

// Optimizer knobs. Defaults implement the documented stopping rule
// (predicted relative loss decrease < 1e-4, at most 200 iterations) and the
// 5-point multi-start.
struct PemOptions {
    int max_iters = 200;
    double rel_improvement_tol = 1e-4;
    int starts = 5;                // theta0 plus (starts-1) Latin-hypercube points
    unsigned rng_seed = 20250819;  // sampler seed; fixed for reproducibility
    int threads = 0;               // 0 = library default (starts run concurrently)
};

// Continuous realization of the driver + neuromuscular blocks at theta.
StateSpace realize_statespace(const IdentTheta& theta, const FixedNeuromuscular& fixed);

// Zero-order-hold discretization via the exponential of the augmented
// [A B; 0 0] block; C and D pass through.
StateSpace discretize(const StateSpace& cont, double dt);

// Runs the discrete realization over the recorded inputs from x(0) = 0 and
// returns both output channels.
void simulate_discrete(const StateSpace& disc, const IdentProblem& p,
                       std::vector<double>& out_Td, std::vector<double>& out_phi);

// Per-channel fit in percent: 100*(1 - ||y - yhat|| / ||y - mean(y)||).
double fit_percent(const std::vector<double>& y, const std::vector<double>& yhat);

// Multi-start prediction-error fit. The parallel variant distributes starts
// across threads; both return the identical (deterministically aggregated)
// result. Throws ConfigError on degenerate data, DynamicsError if the loss
// is non-finite at every start.
IdentResult pem_fit(const IdentProblem& p, const PemOptions& opt = {});
IdentResult pem_fit_serial(const IdentProblem& p, const PemOptions& opt = {});

}  // namespace hgsim
