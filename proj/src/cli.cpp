#include "hgsim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "hgsim/config.hpp"
#include "hgsim/csvio.hpp"
#include "hgsim/errors.hpp"
#include "hgsim/ident.hpp"
#include "hgsim/metrics.hpp"
#include "hgsim/simloop.hpp"

namespace fs = std::filesystem;

namespace hgsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename F>
int guard(F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DynamicsError& e) {
        std::cerr << "dynamics error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

// Canonical snapshot with the run id recorded as a leading comment; the
// comment is ignored on re-parse, so the snapshot re-parses hash-equal.
std::string config_snapshot(const Scenario& sc) {
    return "; run_id = " + run_id(sc) + "\n" + canonical_config(sc);
}

std::string sanitize_cell(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

}  // namespace

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    return guard([&]() -> int {
        const Scenario sc = load_scenario_config(config_path);
        const SimLog log = simulate(sc);
        fs::create_directories(out_dir);
        write_simlog_csv((fs::path(out_dir) / "log.csv").string(), log);
        write_text(fs::path(out_dir) / "config.ini", config_snapshot(sc));
        std::cout << "run " << run_id(sc) << ": " << log.records.size()
                  << " rows -> " << (fs::path(out_dir) / "log.csv").string()
                  << "\n";
        return 0;
    });
}

int cmd_matrix(const std::string& config_path,
               const std::vector<std::string>& vision,
               const std::vector<std::string>& guidance, const std::string& out_dir,
               int threads) {
    return guard([&]() -> int {
        const Scenario base = load_scenario_config(config_path);
        if (vision.empty() || guidance.empty())
            throw ConfigError("matrix needs at least one vision and one guidance entry");

        std::vector<MatrixCell> cells;
        for (const std::string& v : vision) {
            driver_preset(v);  // validate the name up front (throws ConfigError)
            for (const std::string& g : guidance)
                cells.push_back({v, guidance_level_from_string(g)});
        }

        const std::vector<MatrixOutcome> outcomes =
            run_condition_matrix(base, cells, threads);

        fs::create_directories(out_dir);
        for (const MatrixOutcome& oc : outcomes) {
            if (!oc.log) continue;
            // Cell-private staging, atomically moved into place.
            const fs::path tmp = fs::path(out_dir) / ("." + oc.label + ".partial");
            const fs::path dst = fs::path(out_dir) / oc.label;
            fs::remove_all(tmp);
            fs::create_directories(tmp);
            write_simlog_csv((tmp / "log.csv").string(), *oc.log);
            write_text(tmp / "config.ini", config_snapshot(*oc.scenario));
            fs::remove_all(dst);
            fs::rename(tmp, dst);
        }

        // Segment windows for the summary metrics: the straight approach
        // (stopping 50 m short of the curve entry) and the curve itself.
        const std::vector<double> junctions = base.course.junctions();
        const double j0 =
            junctions.empty() ? base.course.total_length() : junctions.front();
        const double j1 =
            junctions.size() > 1 ? junctions[1] : base.course.total_length();

        std::ostringstream summary;
        summary << "label,status,curve_max_abs_lateral_offset_m,straight_sdlp_m,"
                   "peak_abs_phi_rad,error\n";
        int ok = 0;
        for (const MatrixOutcome& oc : outcomes) {
            if (!oc.log) {
                summary << oc.label << ",failed,,,," << sanitize_cell(oc.error)
                        << "\n";
                continue;
            }
            ++ok;
            double curve_max = 0.0, peak_phi = 0.0;
            bool any_curve = false;
            std::vector<double> straight_lat;
            for (const LogRecord& rec : oc.log->records) {
                peak_phi = std::max(peak_phi, std::abs(rec.phi));
                if (rec.s_foot >= j0 && rec.s_foot <= j1) {
                    curve_max = std::max(curve_max, std::abs(rec.lateral_offset));
                    any_curve = true;
                }
                if (rec.s_foot <= j0 - 50.0)
                    straight_lat.push_back(rec.lateral_offset);
            }
            summary << oc.label << ",ok,"
                    << csv_num(any_curve ? curve_max : kNaN) << ","
                    << csv_num(straight_lat.size() >= 2 ? sdlp(straight_lat) : kNaN)
                    << "," << csv_num(peak_phi) << ",\n";
        }
        write_text(fs::path(out_dir) / "summary.csv", summary.str());

        std::cout << "matrix: " << ok << "/" << outcomes.size()
                  << " cells ok -> " << out_dir << "\n";
        return ok > 0 ? 0 : 3;
    });
}

int cmd_metrics(const MetricsArgs& args) {
    return guard([&]() -> int {
        const CsvTable tbl = read_csv(args.log_path);
        const std::vector<double>& t = tbl.col("t");
        const std::vector<double>& lat = tbl.col("lateral_offset");
        const std::vector<double>& phi = tbl.col("phi");
        const std::vector<double>& yaw = tbl.col("r");
        if (t.size() < 2) throw ConfigError("log too short for metrics");
        const double rate = 1.0 / (t[1] - t[0]);
        if (!(rate > 0.0)) throw ConfigError("log time column is not increasing");

        // Forward speed: explicit flag, else inferred from the world path.
        double speed = args.speed;
        if (!(speed > 0.0)) {
            if (!tbl.has("X") || !tbl.has("Y"))
                throw ConfigError(
                    "cannot infer speed (no X/Y columns); pass --speed");
            const std::vector<double>& X = tbl.col("X");
            const std::vector<double>& Y = tbl.col("Y");
            double dist = 0.0;
            for (size_t k = 1; k < X.size(); ++k)
                dist += std::hypot(X[k] - X[k - 1], Y[k] - Y[k - 1]);
            speed = dist / (t.back() - t.front());
        }

        MetricReport rep;
        rep.sdlp = sdlp(lat);
        rep.male = male(lat);
        rep.swrr = swrr(phi, t.back() - t.front());

        // Straight-lane TLC: the relative heading is recovered from the
        // lateral drift rate (sin(theta) = dlat/dt / v).
        std::vector<TlcSample> samples(lat.size());
        for (size_t k = 0; k < lat.size(); ++k) {
            double drift;
            if (k + 1 < lat.size())
                drift = (lat[k + 1] - lat[k]) * rate;
            else
                drift = (lat[k] - lat[k - 1]) * rate;
            const double s = std::clamp(drift / speed, -1.0, 1.0);
            samples[k] = {lat[k], std::asin(s), yaw[k]};
        }
        const LaneGeometry geom{args.lane_width, 0.1};
        rep.tlc_low10_mean = tlc_low10_mean(
            tlc_series_straight(samples, geom, speed, 20.0, args.threads));

        if (!args.eyelid_path.empty()) {
            const CsvTable eye = read_csv(args.eyelid_path);
            const std::vector<double>& et = eye.col("t");
            const std::vector<double>& open = eye.col("openness");
            if (et.size() < 2) throw ConfigError("eyelid series too short");
            const std::vector<double> windows =
                perclos_p80(open, 1.0 / (et[1] - et[0]));
            double mean = 0.0;
            for (double w : windows) mean += w;
            rep.perclos = mean / static_cast<double>(windows.size());
        }
        if (!args.gaze_path.empty()) {
            const CsvTable gz = read_csv(args.gaze_path);
            const std::vector<double>& gy = gz.col("yaw_deg");
            const std::vector<double>& gp = gz.col("pitch_deg");
            std::vector<std::pair<double, double>> gaze(gy.size());
            for (size_t k = 0; k < gy.size(); ++k) gaze[k] = {gy[k], gp[k]};
            rep.prc = prc(gaze);
        }

        std::ostringstream txt;
        txt << "rows = " << t.size() << "\n";
        txt << "duration_s = " << csv_num(t.back() - t.front()) << "\n";
        txt << "speed_mps = " << csv_num(speed) << "\n";
        txt << "lane_width_m = " << csv_num(args.lane_width) << "\n";
        txt << "sdlp_m = " << csv_num(*rep.sdlp) << "\n";
        txt << "male_m = " << csv_num(*rep.male) << "\n";
        txt << "swrr_per_min = " << csv_num(*rep.swrr) << "\n";
        txt << "tlc_low10_mean_s = "
            << (rep.tlc_low10_mean ? csv_num(*rep.tlc_low10_mean)
                                   : std::string("absent"))
            << "\n";
        if (rep.perclos) txt << "perclos_pct = " << csv_num(*rep.perclos) << "\n";
        if (rep.prc) txt << "prc_pct = " << csv_num(*rep.prc) << "\n";

        const fs::path report(args.report_path);
        if (!report.parent_path().empty())
            fs::create_directories(report.parent_path());
        write_text(report, txt.str());

        const fs::path csv_path = report.parent_path() / "metrics.csv";
        write_csv(csv_path.string(),
                  {"sdlp_m", "male_m", "swrr_per_min", "tlc_low10_mean_s",
                   "perclos_pct", "prc_pct"},
                  {{*rep.sdlp, *rep.male, *rep.swrr,
                    rep.tlc_low10_mean ? *rep.tlc_low10_mean : kNaN,
                    rep.perclos ? *rep.perclos : kNaN,
                    rep.prc ? *rep.prc : kNaN}});

        std::cout << "metrics -> " << report.string() << "\n";
        return 0;
    });
}

int cmd_identify(const IdentifyArgs& args) {
    return guard([&]() -> int {
        const CsvTable tbl = read_csv(args.log_path);
        IdentInit init;
        if (!args.init_path.empty()) init = load_ident_init(args.init_path);

        const std::vector<double>& t = tbl.col("t");
        if (t.size() < 2) throw ConfigError("log too short for identification");

        IdentProblem p;
        p.e_y = tbl.col("e_y");
        p.e_theta = tbl.col("e_theta");
        p.phi = tbl.col("phi");
        p.T_h = tbl.col("T_h");
        p.T_d = tbl.col("T_d");
        // The target wheel angle is preferred when the log carries it; the
        // measured wheel angle stands in otherwise.
        p.phi_meas = tbl.has("phi_target") ? tbl.col("phi_target") : tbl.col("phi");
        p.sample_rate = 1.0 / (t[1] - t[0]);
        p.theta0 = init.theta0;
        p.bounds = init.bounds;
        p.fixed = init.fixed;
        p.output_weights = init.output_weights;

        PemOptions opt;
        opt.max_iters = args.max_iters;
        opt.starts = args.starts;
        opt.threads = args.threads;
        const IdentResult res = pem_fit(p, opt);

        fs::create_directories(args.out_dir);
        std::ostringstream params;
        const auto values = res.theta_hat.to_array();
        for (int j = 0; j < IdentTheta::kCount; ++j)
            params << IdentTheta::names()[static_cast<size_t>(j)] << " = "
                   << csv_num(values[static_cast<size_t>(j)]) << "\n";
        params << "fit_Td_pct = " << csv_num(res.fit_Td) << "\n";
        params << "fit_phi_pct = " << csv_num(res.fit_phi) << "\n";
        params << "iterations = " << res.iterations << "\n";
        params << "converged = " << (res.converged ? "true" : "false") << "\n";
        params << "final_loss = " << csv_num(res.final_loss) << "\n";
        params << "best_start = " << res.best_start << "\n";
        write_text(fs::path(args.out_dir) / "params.txt", params.str());

        std::vector<std::vector<double>> rows;
        rows.reserve(res.trace.size());
        for (const IterRecord& it : res.trace)
            rows.push_back({static_cast<double>(it.iter), it.loss, it.lambda,
                            it.step_norm, it.accepted ? 1.0 : 0.0});
        write_csv((fs::path(args.out_dir) / "trace.csv").string(),
                  {"iter", "loss", "lambda", "step_norm", "accepted"}, rows);

        std::cout << "identify: fit_Td = " << csv_num(res.fit_Td)
                  << "%, fit_phi = " << csv_num(res.fit_phi) << "%, "
                  << (res.converged ? "converged" : "NOT converged") << " after "
                  << res.iterations << " iterations -> " << args.out_dir << "\n";
        return res.converged ? 0 : 4;
    });
}

int cmd_plotdata(const std::vector<std::string>& runs,
                 const std::vector<std::string>& signals,
                 const std::string& out_path) {
    return guard([&]() -> int {
        if (runs.empty()) throw ConfigError("plotdata needs at least one run");
        if (signals.empty()) throw ConfigError("plotdata needs at least one signal");

        // Signals must come from the log column set (everything but time).
        std::set<std::string> valid(simlog_columns().begin(),
                                    simlog_columns().end());
        valid.erase("t");
        for (const std::string& s : signals) {
            if (valid.count(s)) continue;
            std::string list;
            for (const std::string& v : valid) list += (list.empty() ? "" : ", ") + v;
            throw ConfigError("unknown signal '" + s + "' (valid: " + list + ")");
        }

        struct Run {
            std::string label;
            CsvTable table;
        };
        std::vector<Run> loaded;
        std::set<std::string> labels;
        for (std::string spec : runs) {
            while (spec.size() > 1 && spec.back() == '/') spec.pop_back();
            fs::path path(spec);
            std::string label;
            if (fs::is_directory(path)) {
                label = path.filename().string();
                path /= "log.csv";
            } else {
                label = path.stem().string();
            }
            if (!labels.insert(label).second)
                throw ConfigError("duplicate run label '" + label + "'");
            loaded.push_back({label, read_csv(path.string())});
        }

        // All runs must agree on the sampling rate.
        double dt0 = 0.0;
        size_t longest = 0;
        for (size_t i = 0; i < loaded.size(); ++i) {
            const std::vector<double>& t = loaded[i].table.col("t");
            if (t.size() < 2)
                throw ConfigError("run '" + loaded[i].label + "' is too short");
            const double dt = t[1] - t[0];
            if (i == 0)
                dt0 = dt;
            else if (std::abs(dt - dt0) > 1e-9)
                throw ConfigError("runs disagree on log rate: '" +
                                  loaded[i].label + "'");
            if (t.size() > loaded[longest].table.col("t").size()) longest = i;
        }

        std::vector<std::string> header{"t"};
        for (const Run& run : loaded)
            for (const std::string& s : signals) header.push_back(run.label + "." + s);

        const std::vector<double>& t_ref = loaded[longest].table.col("t");
        std::vector<std::vector<double>> rows(t_ref.size());
        for (size_t k = 0; k < t_ref.size(); ++k) {
            rows[k].reserve(header.size());
            rows[k].push_back(t_ref[k]);
            for (const Run& run : loaded) {
                for (const std::string& s : signals) {
                    const std::vector<double>& colv = run.table.col(s);
                    rows[k].push_back(k < colv.size() ? colv[k] : kNaN);
                }
            }
        }

        const fs::path out(out_path);
        if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
        write_csv(out.string(), header, rows);
        std::cout << "plotdata: " << rows.size() << " rows x " << header.size()
                  << " columns -> " << out_path << "\n";
        return 0;
    });
}

}  // namespace hgsim
