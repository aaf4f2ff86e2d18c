#pragma once

// Command implementations behind the `hgsim` executable.  Each command
// catches library errors and maps them to its exit code (0 success, 2 bad
// config/input, 3 dynamics abort, 4 identification did not converge),
// printing diagnostics to stderr.  No command writes outside its --out
// destination.

#include <string>
#include <vector>

namespace hgsim {

// Run one scenario config; writes <out>/log.csv and <out>/config.ini (the
// canonical resolved snapshot, headed by a run-id comment).
int cmd_simulate(const std::string& config_path, const std::string& out_dir);

// Cross vision presets with guidance levels from a shared base config; one
// subdirectory per cell plus <out>/summary.csv (input order).  Exit 0 when
// at least one cell succeeded.
int cmd_matrix(const std::string& config_path,
               const std::vector<std::string>& vision,
               const std::vector<std::string>& guidance,
               const std::string& out_dir, int threads = 0);

struct MetricsArgs {
    std::string log_path;
    std::string report_path;
    double lane_width = 3.6;   // m
    double speed = 0.0;        // m/s; 0 = infer from X/Y columns
    std::string gaze_path;     // optional CSV: yaw_deg, pitch_deg
    std::string eyelid_path;   // optional CSV: t, openness
    int threads = 0;
};

// Lane-keeping metrics over a log (straight-lane TLC assumption); writes a
// key = value report to report_path and a one-row metrics.csv next to it.
int cmd_metrics(const MetricsArgs& args);

struct IdentifyArgs {
    std::string log_path;
    std::string init_path;  // optional; defaults when empty
    std::string out_dir;
    int max_iters = 200;
    int starts = 5;
    int threads = 0;
};

// Fit driver parameters to a log; writes <out>/params.txt and
// <out>/trace.csv.  Exit 4 when the fit did not converge (results are still
// written).
int cmd_identify(const IdentifyArgs& args);

// Merge signals from several runs into one wide CSV sharing a time column;
// column names are "<run-label>.<signal>".
int cmd_plotdata(const std::vector<std::string>& runs,
                 const std::vector<std::string>& signals,
                 const std::string& out_path);

}  // namespace hgsim
