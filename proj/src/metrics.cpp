#include "hgsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "hgsim/errors.hpp"
#include "hgsim/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hgsim {

void LaneGeometry::validate() const {
    if (!(lane_width > 0.0)) throw ConfigError("lane width must be positive");
    if (!(boundary_threshold > 0.0 && boundary_threshold < lane_width / 2.0))
        throw ConfigError("boundary threshold must lie in (0, lane_width/2)");
}

double sdlp(const std::vector<double>& x) {
    if (x.size() < 2) throw ConfigError("sdlp needs at least 2 samples");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double male(const std::vector<double>& e) {
    if (e.empty()) throw ConfigError("male needs at least 1 sample");
    double sum = 0.0;
    for (double v : e) sum += std::abs(v);
    return sum / static_cast<double>(e.size());
}

double sdlp_var(double before, double during) {
    if (!(before > 0.0)) throw ConfigError("sdlp_var needs a positive baseline");
    return (during / before - 1.0) * 100.0;
}

namespace {

constexpr double kPathStep = 0.1;     // m, predictive-path increment
constexpr double kYawRateFloor = 1e-6;  // rad/s, below this the path is straight

// Predictive-path point at traversed length l from pose (x0, y0, h0) moving
// along a constant-curvature path (exact circle/line, no integration drift).
inline void path_point(double x0, double y0, double h0, double kappa, double l,
                       double& x, double& y) {
    if (kappa == 0.0) {
        x = x0 + l * std::cos(h0);
        y = y0 + l * std::sin(h0);
    } else {
        const double h = h0 + kappa * l;
        x = x0 + (std::sin(h) - std::sin(h0)) / kappa;
        y = y0 - (std::cos(h) - std::cos(h0)) / kappa;
    }
}

std::optional<double> tlc_one_straight(const TlcSample& s, const LaneGeometry& geom,
                                       double speed, double horizon) {
    const double margin = geom.lane_width / 2.0 - geom.boundary_threshold;
    const double kappa =
        std::abs(s.yaw_rate) < kYawRateFloor ? 0.0 : s.yaw_rate / speed;
    const long long n_steps = std::llround(horizon * speed / kPathStep);
    for (long long k = 0; k <= n_steps; ++k) {
        const double l = static_cast<double>(k) * kPathStep;
        double x, y;
        path_point(0.0, s.lateral, s.rel_heading, kappa, l, x, y);
        if (std::abs(y) > margin) return l / speed;
    }
    return std::nullopt;
}

std::optional<double> tlc_one_course(const LogRecord& rec, const Course& course,
                                     const LaneGeometry& geom, double speed,
                                     double horizon) {
    const double margin = geom.lane_width / 2.0 - geom.boundary_threshold;
    const double kappa =
        std::abs(rec.r) < kYawRateFloor ? 0.0 : rec.r / speed;
    const long long n_steps = std::llround(horizon * speed / kPathStep);
    for (long long k = 0; k <= n_steps; ++k) {
        const double l = static_cast<double>(k) * kPathStep;
        double x, y;
        path_point(rec.X, rec.Y, rec.psi, kappa, l, x, y);
        double lat;
        try {
            lat = course.lateral_offset(x, y, course.foot_point(x, y));
        } catch (const std::domain_error&) {
            return l / speed;  // beyond the corridor: crossed long before
        }
        if (std::abs(lat) > margin) return l / speed;
    }
    return std::nullopt;
}

}  // namespace

std::vector<std::optional<double>> tlc_series_straight_serial(
    const std::vector<TlcSample>& samples, const LaneGeometry& geom, double speed,
    double horizon) {
    geom.validate();
    if (!(speed > 0.0)) throw ConfigError("tlc needs a positive speed");
    std::vector<std::optional<double>> out(samples.size());
    for (size_t i = 0; i < samples.size(); ++i)
        out[i] = tlc_one_straight(samples[i], geom, speed, horizon);
    return out;
}

std::vector<std::optional<double>> tlc_series_straight(
    const std::vector<TlcSample>& samples, const LaneGeometry& geom, double speed,
    double horizon, int threads) {
    geom.validate();
    if (!(speed > 0.0)) throw ConfigError("tlc needs a positive speed");
    std::vector<std::optional<double>> out(samples.size());
    const int n = resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for num_threads(n) schedule(dynamic, 64)
#endif
    for (long long i = 0; i < static_cast<long long>(samples.size()); ++i)
        out[static_cast<size_t>(i)] =
            tlc_one_straight(samples[static_cast<size_t>(i)], geom, speed, horizon);
    (void)n;
    return out;
}

std::vector<std::optional<double>> tlc_series_serial(const SimLog& log,
                                                     const Course& course,
                                                     const LaneGeometry& geom,
                                                     double speed, double horizon) {
    geom.validate();
    if (!(speed > 0.0)) throw ConfigError("tlc needs a positive speed");
    std::vector<std::optional<double>> out(log.records.size());
    for (size_t i = 0; i < log.records.size(); ++i)
        out[i] = tlc_one_course(log.records[i], course, geom, speed, horizon);
    return out;
}

std::vector<std::optional<double>> tlc_series(const SimLog& log, const Course& course,
                                              const LaneGeometry& geom, double speed,
                                              double horizon, int threads) {
    geom.validate();
    if (!(speed > 0.0)) throw ConfigError("tlc needs a positive speed");
    std::vector<std::optional<double>> out(log.records.size());
    const int n = resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for num_threads(n) schedule(dynamic, 16)
#endif
    for (long long i = 0; i < static_cast<long long>(log.records.size()); ++i)
        out[static_cast<size_t>(i)] = tlc_one_course(
            log.records[static_cast<size_t>(i)], course, geom, speed, horizon);
    (void)n;
    return out;
}

std::optional<double> tlc_low10_mean(const std::vector<std::optional<double>>& tlc) {
    std::vector<double> present;
    present.reserve(tlc.size());
    for (const auto& v : tlc)
        if (v) present.push_back(*v);
    if (present.size() < 10) return std::nullopt;
    const size_t k = present.size() / 10;
    std::nth_element(present.begin(), present.begin() + static_cast<long>(k),
                     present.end());
    std::sort(present.begin(), present.begin() + static_cast<long>(k));
    double sum = 0.0;
    for (size_t i = 0; i < k; ++i) sum += present[i];
    return sum / static_cast<double>(k);
}

double swrr(const std::vector<double>& phi, double duration_s, double alpha) {
    if (!(duration_s > 0.0)) throw ConfigError("swrr needs a positive duration");
    if (!(alpha > 0.0)) throw ConfigError("swrr needs a positive gap angle");

    int count = 0;
    if (phi.size() >= 2) {
        int dir = 0;  // confirmed movement direction; 0 until the first move
        double ext = phi.front();
        for (size_t i = 1; i < phi.size(); ++i) {
            const double x = phi[i];
            if (dir == 0) {
                if (x != ext) {
                    dir = x > ext ? 1 : -1;
                    ext = x;
                }
            } else if (dir > 0) {
                if (x > ext)
                    ext = x;
                else if (ext - x >= alpha) {
                    ++count;
                    dir = -1;
                    ext = x;
                }
            } else {
                if (x < ext)
                    ext = x;
                else if (x - ext >= alpha) {
                    ++count;
                    dir = 1;
                    ext = x;
                }
            }
        }
    }
    return static_cast<double>(count) / (duration_s / 60.0);
}

double turn_start(const std::vector<double>& phi, const std::vector<double>& s_foot,
                  double junction_s, double threshold) {
    if (phi.size() != s_foot.size())
        throw ConfigError("turn_start: phi and s_foot lengths differ");
    for (size_t i = 0; i < phi.size(); ++i)
        if (std::abs(phi[i]) >= threshold) return s_foot[i] - junction_s;
    throw ConfigError("turn_start: no crossing (|phi| never reached threshold)");
}

std::vector<double> perclos_p80(const std::vector<double>& openness, double rate_hz) {
    if (openness.empty()) throw ConfigError("perclos needs a non-empty series");
    if (!(rate_hz > 0.0)) throw ConfigError("perclos needs a positive rate");
    const size_t window = static_cast<size_t>(std::max(1.0, std::round(60.0 * rate_hz)));

    std::vector<double> out;
    for (size_t i0 = 0; i0 < openness.size(); i0 += window) {
        const size_t i1 = std::min(i0 + window, openness.size());
        size_t closed = 0;
        for (size_t i = i0; i < i1; ++i)
            if (openness[i] <= 0.2) ++closed;
        out.push_back(100.0 * static_cast<double>(closed) /
                      static_cast<double>(i1 - i0));
    }
    return out;
}

double prc(const std::vector<std::pair<double, double>>& gaze_deg, double radius) {
    if (gaze_deg.empty()) throw ConfigError("prc needs a non-empty series");

    struct Bin {
        size_t count = 0;
        size_t first_seen = 0;
        double sum_yaw = 0.0;
        double sum_pitch = 0.0;
    };
    std::map<std::pair<long, long>, Bin> bins;
    size_t order = 0;
    for (const auto& [yaw, pitch] : gaze_deg) {
        const std::pair<long, long> key{
            static_cast<long>(std::floor(yaw / 0.5)),
            static_cast<long>(std::floor(pitch / 0.5))};
        Bin& b = bins[key];
        if (b.count == 0) b.first_seen = order;
        ++b.count;
        b.sum_yaw += yaw;
        b.sum_pitch += pitch;
        ++order;
    }

    const Bin* best = nullptr;
    for (const auto& [key, b] : bins)
        if (!best || b.count > best->count ||
            (b.count == best->count && b.first_seen < best->first_seen))
            best = &b;

    const double cy = best->sum_yaw / static_cast<double>(best->count);
    const double cp = best->sum_pitch / static_cast<double>(best->count);
    size_t inside = 0;
    for (const auto& [yaw, pitch] : gaze_deg) {
        const double d = std::hypot(yaw - cy, pitch - cp);
        if (d <= radius) ++inside;
    }
    return 100.0 * static_cast<double>(inside) / static_cast<double>(gaze_deg.size());
}

}  // namespace hgsim
