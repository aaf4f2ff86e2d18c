#include "hgsim/simloop.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hgsim/errors.hpp"
#include "hgsim/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hgsim {

namespace {

constexpr double kPiHalf = 1.57079632679489661923;

// Flat integration state: pose + lateral dynamics + column + driver states.
using StateVec = std::array<double, 10>;
enum { iX, iY, iPsi, iBeta, iR, iPhi, iPhiDot, iXint, iXpade, iXnms };

// Quantities frozen for the duration of one integrator step.
struct Held {
    double e_y_dot;        // driver near-point error rate (backward difference)
    double hap_ey_rate;    // guidance error rates, same rule
    double hap_eth_rate;
    double T_h_for_nms;    // previous step's guidance torque
    double T_ext;          // pulse torque
};

struct LoopContext {
    const Scenario& sc;
    std::optional<double> t_far;      // driver far-point look-ahead if enabled
    bool guided;                      // K1 != 0: guidance participates at all
};

StateVec derivative(const LoopContext& ctx, const StateVec& y, const Held& h) {
    const Scenario& sc = ctx.sc;

    const PreviewErrors de = sc.course.preview_errors(
        y[iX], y[iY], y[iPsi], sc.vehicle.v, sc.driver.t_n, ctx.t_far);

    DriverState ds;
    ds.x_int = y[iXint];
    ds.x_pade = y[iXpade];
    ds.x_nms = y[iXnms];
    const double u_pre = visual_command(sc.driver, de, h.e_y_dot, ds);
    const double phi_target = pade_output(sc.driver, ds, u_pre);
    const double torque_target =
        (sc.neuromuscular.K_d + sc.neuromuscular.K_nms) * phi_target -
        sc.neuromuscular.K_nms * y[iPhi] - sc.neuromuscular.K_hf * h.T_h_for_nms;

    double T_h = 0.0;
    if (ctx.guided) {
        const PreviewErrors he = sc.course.preview_errors(
            y[iX], y[iY], y[iPsi], sc.vehicle.v, sc.haptic.t_n, sc.haptic.t_f);
        T_h = haptic_torque(sc.haptic, he, h.hap_ey_rate, h.hap_eth_rate);
    }

    PlantState ps{y[iX], y[iY], y[iPsi], y[iBeta], y[iR], y[iPhi], y[iPhiDot]};
    const PlantState pd = plant_derivative(sc.vehicle, ps, {y[iXnms], T_h, h.T_ext});

    return {pd.X,        pd.Y,
            pd.psi,      pd.beta,
            pd.r,        pd.phi,
            pd.phi_dot,  de.e_y,
            (2.0 / sc.driver.t_p) * (u_pre - y[iXpade]),
            (torque_target - y[iXnms]) / sc.neuromuscular.t_nms};
}

StateVec rk4_step(const LoopContext& ctx, const StateVec& y, const Held& h, double dt) {
    auto axpy = [](const StateVec& a, double s, const StateVec& b) {
        StateVec r;
        for (size_t i = 0; i < r.size(); ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    const StateVec k1 = derivative(ctx, y, h);
    const StateVec k2 = derivative(ctx, axpy(y, 0.5 * dt, k1), h);
    const StateVec k3 = derivative(ctx, axpy(y, 0.5 * dt, k2), h);
    const StateVec k4 = derivative(ctx, axpy(y, dt, k3), h);
    StateVec out;
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace

void Scenario::validate() const {
    vehicle.validate();
    driver.validate();
    neuromuscular.validate();
    haptic.validate();
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (!(integrator_step > 0.0)) throw ConfigError("integrator_step must be positive");
    const double cap = std::min(driver.t_p, neuromuscular.t_nms) / 10.0;
    if (integrator_step > cap * (1.0 + 1e-12))
        throw ConfigError("integrator_step " + std::to_string(integrator_step) +
                          " s too coarse: must be <= min(t_p, t_nms)/10 = " +
                          std::to_string(cap) + " s");
    if (!(log_rate > 0.0)) throw ConfigError("log_rate must be positive");
    const double steps_per_log = 1.0 / (log_rate * integrator_step);
    if (std::abs(steps_per_log - std::round(steps_per_log)) > 1e-9 ||
        std::round(steps_per_log) < 1.0)
        throw ConfigError("log_rate must divide 1/integrator_step evenly");
    if (pulse) {
        if (!(pulse->start_time >= 0.0) || !(pulse->duration >= 0.0))
            throw ConfigError("pulse start/duration must be >= 0");
        if (!std::isfinite(pulse->magnitude))
            throw ConfigError("pulse magnitude must be finite");
    }
}

SimLog simulate(const Scenario& sc, SimProbe* probe) {
    sc.validate();

    const double dt = sc.integrator_step;
    const long long n_steps = std::llround(sc.t_end / dt);
    const long long log_every = std::llround(1.0 / (sc.log_rate * dt));

    LoopContext ctx{sc,
                    sc.driver.far_point_enabled ? std::optional<double>(sc.driver.t_f)
                                                : std::nullopt,
                    sc.haptic.K1 != 0.0};

    SimLog log;
    log.log_rate = sc.log_rate;
    log.records.reserve(static_cast<size_t>(n_steps / log_every) + 1);
    if (probe) {
        probe->phi_target.clear();
        probe->phi_target.reserve(log.records.capacity());
    }

    StateVec y{};  // centered, aligned, at rest
    PreviewErrors de_prev{}, he_prev{};
    double T_h_prev = 0.0;

    for (long long k = 0; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;

        // Step-start evaluations (also the logged values).
        PreviewErrors de, he{};
        double s_foot = 0.0;
        try {
            de = sc.course.preview_errors(y[iX], y[iY], y[iPsi], sc.vehicle.v,
                                          sc.driver.t_n, ctx.t_far);
            if (ctx.guided)
                he = sc.course.preview_errors(y[iX], y[iY], y[iPsi], sc.vehicle.v,
                                              sc.haptic.t_n, sc.haptic.t_f);
            s_foot = sc.course.foot_point(y[iX], y[iY]);
        } catch (const std::domain_error& e) {
            throw DynamicsError("vehicle left the course corridor at t = " +
                                    std::to_string(t) + " s: " + e.what(),
                                t);
        }

        Held h;
        h.e_y_dot = k == 0 ? 0.0 : (de.e_y - de_prev.e_y) / dt;
        h.hap_ey_rate = k == 0 ? 0.0 : (he.e_y - he_prev.e_y) / dt;
        h.hap_eth_rate = k == 0 ? 0.0 : (he.e_theta - he_prev.e_theta) / dt;
        h.T_h_for_nms = T_h_prev;
        h.T_ext = 0.0;
        if (sc.pulse && t >= sc.pulse->start_time &&
            t < sc.pulse->start_time + sc.pulse->duration)
            h.T_ext = sc.pulse->magnitude;

        const double T_h_now =
            ctx.guided ? haptic_torque(sc.haptic, he, h.hap_ey_rate, h.hap_eth_rate)
                       : 0.0;

        if (k % log_every == 0) {
            const double delta = sc.vehicle.K_t * y[iPhi];
            LogRecord rec;
            rec.t = t;
            rec.X = y[iX];
            rec.Y = y[iY];
            rec.psi = y[iPsi];
            rec.beta = y[iBeta];
            rec.r = y[iR];
            rec.phi = y[iPhi];
            rec.delta = delta;
            rec.T_d = y[iXnms];
            rec.T_h = T_h_now;
            rec.T_a = aligning_torque(sc.vehicle, y[iBeta], y[iR], delta);
            rec.e_y = de.e_y;
            rec.e_theta = de.e_theta;
            rec.s_foot = s_foot;
            rec.lateral_offset = sc.course.lateral_offset(y[iX], y[iY], s_foot);
            log.records.push_back(rec);
            if (probe) {
                DriverState ds;
                ds.x_int = y[iXint];
                ds.x_pade = y[iXpade];
                const double u_pre = visual_command(sc.driver, de, h.e_y_dot, ds);
                probe->phi_target.push_back(pade_output(sc.driver, ds, u_pre));
            }
        }

        if (k == n_steps) break;

        try {
            y = rk4_step(ctx, y, h, dt);
        } catch (const std::domain_error& e) {
            throw DynamicsError("vehicle left the course corridor at t = " +
                                    std::to_string(t) + " s: " + e.what(),
                                t);
        }

        if (!(std::abs(y[iBeta]) < kPiHalf))
            throw DynamicsError("slip angle left the linear-model envelope at t = " +
                                    std::to_string(t + dt) + " s",
                                t + dt);
        for (double v : y)
            if (!std::isfinite(v))
                throw DynamicsError("state diverged at t = " + std::to_string(t + dt) + " s",
                                    t + dt);

        de_prev = de;
        he_prev = he;
        T_h_prev = T_h_now;
    }

    return log;
}

namespace {

MatrixOutcome run_cell(const Scenario& base, const MatrixCell& cell) {
    MatrixOutcome out;
    out.label = cell.vision + "_" + to_string(cell.level);
    try {
        Scenario sc = base;
        sc.driver = driver_preset(cell.vision);
        sc.haptic = guidance_level(base.haptic, cell.level);
        sc.neuromuscular = neuromuscular_preset(
            cell.level == GuidanceLevel::none ? "manual" : "assisted");
        out.scenario = sc;
        out.log = simulate(sc);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace

std::vector<MatrixOutcome> run_condition_matrix_serial(const Scenario& base,
                                                       const std::vector<MatrixCell>& cells) {
    std::vector<MatrixOutcome> out(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) out[i] = run_cell(base, cells[i]);
    return out;
}

std::vector<MatrixOutcome> run_condition_matrix(const Scenario& base,
                                                const std::vector<MatrixCell>& cells,
                                                int threads) {
    std::vector<MatrixOutcome> out(cells.size());
    const int n = resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for num_threads(n) schedule(dynamic)
#endif
    for (long long i = 0; i < static_cast<long long>(cells.size()); ++i)
        out[static_cast<size_t>(i)] = run_cell(base, cells[static_cast<size_t>(i)]);
    (void)n;
    return out;
}

}  // namespace hgsim
