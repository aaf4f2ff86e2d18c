// hgsim command-line tool: simulate scenarios, sweep driving conditions,
// compute lane-keeping metrics, identify driver parameters, export plot data.

#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hgsim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Driver/guidance shared-steering simulator and analysis toolkit"};
    app.require_subcommand(1);

    std::string sim_config, sim_out;
    CLI::App* sim = app.add_subcommand("simulate", "Run one scenario config");
    sim->add_option("--config", sim_config, "Scenario config file")->required();
    sim->add_option("--out", sim_out, "Output directory")->required();

    std::string mat_config, mat_out;
    std::vector<std::string> mat_vision, mat_guidance;
    int mat_threads = 0;
    CLI::App* mat =
        app.add_subcommand("matrix", "Sweep vision presets x guidance levels");
    mat->add_option("--config", mat_config, "Base scenario config")->required();
    mat->add_option("--vision", mat_vision,
                    "Vision presets (normal, low_visibility, declined_attention)")
        ->required()
        ->delimiter(',');
    mat->add_option("--guidance", mat_guidance,
                    "Guidance levels (none, normal, strong, full)")
        ->required()
        ->delimiter(',');
    mat->add_option("--out", mat_out, "Output directory")->required();
    mat->add_option("--threads", mat_threads, "Concurrent cells (0 = default)");

    hgsim::MetricsArgs margs;
    CLI::App* met = app.add_subcommand("metrics", "Lane-keeping metrics over a log");
    met->add_option("--log", margs.log_path, "Log CSV")->required();
    met->add_option("--report", margs.report_path, "Report output path")->required();
    met->add_option("--lane-width", margs.lane_width, "Lane width [m]")
        ->capture_default_str();
    met->add_option("--speed", margs.speed,
                    "Forward speed [m/s] (default: inferred from X/Y)");
    met->add_option("--gaze", margs.gaze_path, "Gaze CSV (yaw_deg, pitch_deg)");
    met->add_option("--eyelid", margs.eyelid_path, "Eyelid CSV (t, openness)");
    met->add_option("--threads", margs.threads, "TLC worker threads (0 = default)");

    hgsim::IdentifyArgs iargs;
    CLI::App* idf =
        app.add_subcommand("identify", "Fit driver parameters to a log");
    idf->add_option("--log", iargs.log_path, "Log CSV")->required();
    idf->add_option("--init", iargs.init_path,
                    "Init file ([theta0], [bounds], [fixed], [weights])");
    idf->add_option("--out", iargs.out_dir, "Output directory")->required();
    idf->add_option("--max-iter", iargs.max_iters, "Iteration cap per start")
        ->capture_default_str();
    idf->add_option("--starts", iargs.starts, "Number of starts")
        ->capture_default_str();
    idf->add_option("--threads", iargs.threads, "Concurrent starts (0 = default)");

    std::vector<std::string> plot_runs, plot_signals;
    std::string plot_out;
    CLI::App* plot =
        app.add_subcommand("plotdata", "Merge run signals into one wide CSV");
    plot->add_option("--runs", plot_runs, "Run directories (or log CSV paths)")
        ->required();
    plot->add_option("--signals", plot_signals, "Log column names")
        ->required()
        ->delimiter(',');
    plot->add_option("--out", plot_out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // bad command line = bad config
    }

    if (*sim) return hgsim::cmd_simulate(sim_config, sim_out);
    if (*mat)
        return hgsim::cmd_matrix(mat_config, mat_vision, mat_guidance, mat_out,
                                 mat_threads);
    if (*met) return hgsim::cmd_metrics(margs);
    if (*idf) return hgsim::cmd_identify(iargs);
    if (*plot) return hgsim::cmd_plotdata(plot_runs, plot_signals, plot_out);
    return 2;
}
