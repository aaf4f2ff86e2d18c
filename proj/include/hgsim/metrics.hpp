#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hgsim/course.hpp"
#include "hgsim/simloop.hpp"

namespace hgsim {

struct LaneGeometry {
    double lane_width;                // m
    double boundary_threshold = 0.1;  // m, crossing declared inside this margin

    void validate() const;  // 0 < boundary_threshold < lane_width/2
};

// Standard deviation of lateral position, N-1 divisor.  Requires N >= 2.
double sdlp(const std::vector<double>& lateral_positions);

// Mean absolute lateral error.  Requires N >= 1.
double male(const std::vector<double>& lateral_errors);

// Relative SDLP change, percent.  Requires sdlp_before > 0.
double sdlp_var(double sdlp_before, double sdlp_during);

// --- Time to lane crossing ---------------------------------------------
//
// Per sample, a no-intervention predictive path is traced at constant speed
// and constant current yaw rate (a circle; a straight line when |r| < 1e-6
// rad/s) in 0.1 m increments until the distance to a lane boundary drops
// below boundary_threshold.  TLC = traversed length / speed.  Samples that
// never cross within the horizon are absent (nullopt).

// Road-frame sample for the straight-lane variant.
struct TlcSample {
    double lateral;      // m, left-positive offset from the centerline
    double rel_heading;  // rad, vehicle heading minus road tangent
    double yaw_rate;     // rad/s
};

// Straight-lane variant: the road runs along +X of the sample frame.
std::vector<std::optional<double>> tlc_series_straight(
    const std::vector<TlcSample>& samples, const LaneGeometry& geom, double speed,
    double horizon = 20.0, int threads = 0);
std::vector<std::optional<double>> tlc_series_straight_serial(
    const std::vector<TlcSample>& samples, const LaneGeometry& geom, double speed,
    double horizon = 20.0);

// Course-aware variant: predictive positions are projected onto the actual
// course geometry.
std::vector<std::optional<double>> tlc_series(const SimLog& log, const Course& course,
                                              const LaneGeometry& geom, double speed,
                                              double horizon = 20.0, int threads = 0);
std::vector<std::optional<double>> tlc_series_serial(const SimLog& log,
                                                     const Course& course,
                                                     const LaneGeometry& geom,
                                                     double speed, double horizon = 20.0);

// Mean of the lowest 10% of present TLC samples (k = floor(n/10), needing at
// least 10 present samples); absent otherwise.
std::optional<double> tlc_low10_mean(const std::vector<std::optional<double>>& tlc);

// --- Steering wheel reversal rate ---------------------------------------
//
// Gap method: a reversal is registered each time the signal, after a running
// extremum, moves >= alpha in the opposite direction.  Endpoints are not
// counted.  Returns reversals per minute.
double swrr(const std::vector<double>& steering_angles, double duration_s,
            double alpha = 3.0 * 3.14159265358979323846 / 180.0);

// Arc length (relative to junction_s) of the first sample where |phi|
// reaches threshold; negative = the steering action began before the
// junction.  Throws ConfigError when no sample crosses.
double turn_start(const std::vector<double>& phi, const std::vector<double>& s_foot,
                  double junction_s, double threshold = 3.0 * 3.14159265358979323846 / 180.0);

// --- Eye measures ---------------------------------------------------------

// Percentage of samples with openness <= 0.2 ("80% or more closed") over
// consecutive 60 s windows; the final partial window is included, so the
// windows partition the input.  Requires a non-empty series and rate > 0.
std::vector<double> perclos_p80(const std::vector<double>& eyelid_open_fraction,
                                double rate_hz);

// Percent road center: share of gaze samples within `radius` degrees
// (inclusive) of the modal gaze direction.  The mode is the centroid of the
// densest 0.5 degree x 0.5 degree histogram bin (ties -> first-seen bin).
double prc(const std::vector<std::pair<double, double>>& gaze_deg, double radius = 6.0);

// Flat report over one log; fields are present when their inputs were.
struct MetricReport {
    std::optional<double> sdlp;
    std::optional<double> male;
    std::optional<double> tlc_low10_mean;
    std::optional<double> swrr;
    std::optional<double> sdlp_var;
    std::vector<double> turn_start_offsets;
    std::optional<double> perclos;  // whole-series percentage
    std::optional<double> prc;
};

}  // namespace hgsim
