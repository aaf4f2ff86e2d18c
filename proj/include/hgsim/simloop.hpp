#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hgsim/course.hpp"
#include "hgsim/driver.hpp"
#include "hgsim/guidance.hpp"
#include "hgsim/plant.hpp"

namespace hgsim {

struct PulseSpec {
    double start_time;  // s
    double duration;    // s
    double magnitude;   // N m
};

struct Scenario {
    Course course = build_thesis_course();
    VehicleParams vehicle = vehicle_preset_default();
    DriverParams driver = driver_preset("normal");
    NeuromuscularParams neuromuscular = neuromuscular_preset("manual");
    HapticParams haptic = guidance_level(haptic_preset("ch4"), GuidanceLevel::none);
    std::optional<PulseSpec> pulse;
    double t_end = 105.0;            // s
    double integrator_step = 1.0 / 1200.0;  // s; 10 steps per 120 Hz log row
    double log_rate = 120.0;         // Hz

    // Throws ConfigError: all sub-parameter checks, integrator_step <=
    // min(t_p, t_nms)/10, and log_rate dividing 1/integrator_step evenly.
    void validate() const;
};

struct LogRecord {
    double t, X, Y, psi, beta, r, phi, delta, T_d, T_h, T_a, e_y, e_theta,
        s_foot, lateral_offset;
};

struct SimLog {
    std::vector<LogRecord> records;
    double log_rate = 120.0;
};

// Optional per-log-instant internals recorded alongside the SimLog; used by
// the identification round trip, which needs the driver's target angle (a
// signal no column sensor sees).
struct SimProbe {
    std::vector<double> phi_target;  // delayed visual command at log instants
};

// Integrate the closed loop (vehicle + column + driver + guidance) with
// fixed-step classical RK4.  Within a step, preview errors, the visual
// command, the delay and torque states, the guidance torque and the column
// all evaluate per stage from the stage state; the quantities held constant
// across the step are the backward-difference rates (driver e_y rate,
// guidance error rates), the pulse torque, and the previous step's guidance
// torque as seen by the neuromuscular stage (one-step lag breaking the
// driver/guidance feedback loop).  Bitwise deterministic.
//
// Throws DynamicsError when |beta| >= pi/2 or the vehicle strays beyond the
// course corridor; ConfigError for invalid scenarios.
SimLog simulate(const Scenario& sc, SimProbe* probe = nullptr);

// One cell of a vision x guidance condition grid.
struct MatrixCell {
    std::string vision;   // driver preset name
    GuidanceLevel level;
};

struct MatrixOutcome {
    std::string label;                // "<vision>_<level>"
    std::optional<Scenario> scenario; // resolved per-cell scenario
    std::optional<SimLog> log;        // set on success
    std::string error;                // set on failure
};

// Run every cell from the same base scenario and identical initial state.
// The vision preset replaces the driver parameters; the guidance level sets
// K1 on the base haptic set; level "none" pairs with the manual
// torque-generation preset and any guided level with the assisted one.
// Outcomes are ordered by input order; per-cell failures are recorded in
// the outcome without affecting other cells.
std::vector<MatrixOutcome> run_condition_matrix(const Scenario& base,
                                                const std::vector<MatrixCell>& cells,
                                                int threads = 0);

// Serial reference implementation (identical results, one cell at a time).
std::vector<MatrixOutcome> run_condition_matrix_serial(const Scenario& base,
                                                       const std::vector<MatrixCell>& cells);

}  // namespace hgsim
