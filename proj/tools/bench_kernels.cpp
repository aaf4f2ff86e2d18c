// Timing harness for the parallel kernels against their serial reference
// implementations: condition-matrix sweeps, course-aware TLC series, and the
// multi-start identification fit.  Each kernel is checked for exact
// (bit-identical) agreement between the two paths before reporting speedup.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "hgsim/ident.hpp"
#include "hgsim/metrics.hpp"
#include "hgsim/parallel.hpp"
#include "hgsim/simloop.hpp"

using namespace hgsim;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

bool log_equal(const SimLog& a, const SimLog& b) {
    if (a.records.size() != b.records.size()) return false;
    for (size_t i = 0; i < a.records.size(); ++i) {
        const LogRecord& x = a.records[i];
        const LogRecord& y = b.records[i];
        if (x.t != y.t || x.X != y.X || x.Y != y.Y || x.psi != y.psi ||
            x.beta != y.beta || x.r != y.r || x.phi != y.phi ||
            x.delta != y.delta || x.T_d != y.T_d || x.T_h != y.T_h ||
            x.T_a != y.T_a || x.e_y != y.e_y || x.e_theta != y.e_theta ||
            x.s_foot != y.s_foot || x.lateral_offset != y.lateral_offset)
            return false;
    }
    return true;
}

void report(const char* name, double serial_ms, double parallel_ms, bool match) {
    std::printf("%-22s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   %s\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms,
                match ? "results match" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("threads available: %d\n\n", resolve_threads(0));

    // --- condition matrix -------------------------------------------------
    {
        Scenario base;
        base.t_end = 40.0;
        std::vector<MatrixCell> cells;
        for (const char* v : {"normal", "low_visibility", "declined_attention"})
            for (GuidanceLevel g : {GuidanceLevel::none, GuidanceLevel::normal})
                cells.push_back({v, g});

        auto t0 = std::chrono::steady_clock::now();
        const auto serial = run_condition_matrix_serial(base, cells);
        const double t_serial = ms_since(t0);

        t0 = std::chrono::steady_clock::now();
        const auto parallel = run_condition_matrix(base, cells);
        const double t_parallel = ms_since(t0);

        bool match = serial.size() == parallel.size();
        for (size_t i = 0; match && i < serial.size(); ++i)
            match = serial[i].label == parallel[i].label &&
                    serial[i].log.has_value() == parallel[i].log.has_value() &&
                    (!serial[i].log || log_equal(*serial[i].log, *parallel[i].log));
        report("condition matrix", t_serial, t_parallel, match);
    }

    // --- course-aware TLC ---------------------------------------------------
    {
        Scenario sc;
        sc.t_end = 105.0;
        const SimLog full = simulate(sc);
        SimLog log;  // every 4th sample keeps the bench brisk
        log.log_rate = full.log_rate / 4.0;
        for (size_t i = 0; i < full.records.size(); i += 4)
            log.records.push_back(full.records[i]);

        const LaneGeometry geom{sc.course.lane_width(), 0.1};
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = tlc_series_serial(log, sc.course, geom, sc.vehicle.v);
        const double t_serial = ms_since(t0);

        t0 = std::chrono::steady_clock::now();
        const auto parallel = tlc_series(log, sc.course, geom, sc.vehicle.v);
        const double t_parallel = ms_since(t0);

        bool match = serial.size() == parallel.size();
        for (size_t i = 0; match && i < serial.size(); ++i)
            match = serial[i].has_value() == parallel[i].has_value() &&
                    (!serial[i] || *serial[i] == *parallel[i]);
        report("tlc series", t_serial, t_parallel, match);
    }

    // --- multi-start identification ----------------------------------------
    {
        IdentProblem p;
        p.sample_rate = 120.0;
        const size_t n = 4000;
        std::mt19937 gen(7);
        std::normal_distribution<double> noise(0.0, 1.0);
        p.e_y.resize(n);
        p.e_theta.resize(n);
        p.phi.resize(n);
        p.T_h.resize(n);
        for (size_t k = 0; k < n; ++k) {
            const double t = static_cast<double>(k) / p.sample_rate;
            p.e_y[k] = 0.3 * std::sin(0.7 * t) + 0.05 * noise(gen);
            p.e_theta[k] = 0.02 * std::sin(1.3 * t + 1.0);
            p.phi[k] = 0.2 * std::sin(0.5 * t + 0.4);
            p.T_h[k] = 0.5 * std::sin(0.9 * t + 2.0);
        }
        IdentTheta truth;
        truth.a1 = 0.22;
        truth.a4 = 4.1;
        truth.K_d = 3.4;
        truth.K_hf = 0.45;
        const StateSpace disc =
            discretize(realize_statespace(truth, p.fixed), 1.0 / p.sample_rate);
        simulate_discrete(disc, p, p.T_d, p.phi_meas);
        for (size_t k = 0; k < n; ++k) p.T_d[k] += 0.01 * noise(gen);

        PemOptions opt;
        opt.max_iters = 40;
        auto t0 = std::chrono::steady_clock::now();
        const IdentResult serial = pem_fit_serial(p, opt);
        const double t_serial = ms_since(t0);

        t0 = std::chrono::steady_clock::now();
        const IdentResult parallel = pem_fit(p, opt);
        const double t_parallel = ms_since(t0);

        const bool match =
            serial.theta_hat.to_array() == parallel.theta_hat.to_array() &&
            serial.final_loss == parallel.final_loss &&
            serial.best_start == parallel.best_start;
        report("pem multistart", t_serial, t_parallel, match);
    }

    return 0;
}
