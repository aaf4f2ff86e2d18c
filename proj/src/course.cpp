#include "hgsim/course.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hgsim/errors.hpp"

namespace hgsim {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

Course::Course(std::vector<Segment> segments, double lane_width,
               double x0, double y0, double heading0)
    : segs_(std::move(segments)), lane_width_(lane_width) {
    if (segs_.empty()) throw ConfigError("course needs at least one segment");
    if (!(lane_width > 0.0) || !std::isfinite(lane_width))
        throw ConfigError("lane width must be positive, got " + std::to_string(lane_width));

    nodes_.reserve(segs_.size());
    double s = 0.0, x = x0, y = y0, h = heading0;
    for (const Segment& seg : segs_) {
        if (!(seg.length > 0.0) || !std::isfinite(seg.length))
            throw ConfigError("segment length must be positive, got " + std::to_string(seg.length));
        if (!std::isfinite(seg.curvature))
            throw ConfigError("segment curvature must be finite");
        nodes_.push_back({s, x, y, h, seg.length, seg.curvature});
        // Advance to the segment end pose.
        if (seg.curvature == 0.0) {
            x += seg.length * std::cos(h);
            y += seg.length * std::sin(h);
        } else {
            const double h1 = h + seg.curvature * seg.length;
            x += (std::sin(h1) - std::sin(h)) / seg.curvature;
            y -= (std::cos(h1) - std::cos(h)) / seg.curvature;
            h = h1;
        }
        s += seg.length;
    }
    total_ = s;
}

const Course::Node& Course::node_at(double s) const {
    // Half-open ownership [s0, s0+len); the last segment also owns its end
    // point, so curvature changes land exactly on the junction arc length.
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s,
                               [](double v, const Node& n) { return v < n.s0; });
    if (it != nodes_.begin()) --it;
    return *it;
}

PointOnPath Course::point_on(const Node& n, double u) const {
    if (n.kappa == 0.0)
        return {n.x0 + u * std::cos(n.h0), n.y0 + u * std::sin(n.h0), n.h0, 0.0};
    const double h = n.h0 + n.kappa * u;
    return {n.x0 + (std::sin(h) - std::sin(n.h0)) / n.kappa,
            n.y0 - (std::cos(h) - std::cos(n.h0)) / n.kappa, h, n.kappa};
}

PointOnPath Course::centerline_at(double s) const {
    if (!(s >= 0.0 && s <= total_))
        throw std::out_of_range("arc length " + std::to_string(s) +
                                " outside course [0, " + std::to_string(total_) + "]");
    const Node& n = node_at(s);
    return point_on(n, s - n.s0);
}

void Course::project_on(const Node& n, double px, double py, double& best_s,
                        double& best_d2) const {
    auto consider = [&](double u) {
        const PointOnPath p = point_on(n, u);
        const double dx = px - p.x, dy = py - p.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best_s = n.s0 + u;
        }
    };
    consider(0.0);
    if (n.kappa == 0.0) {
        // Orthogonal projection onto the segment direction.
        const double tx = std::cos(n.h0), ty = std::sin(n.h0);
        const double u = (px - n.x0) * tx + (py - n.y0) * ty;
        if (u > 0.0 && u < n.len) consider(u);
    } else {
        // Interior candidate: the arc point whose center ray passes through
        // the query.  The path point at local length u sits at polar angle
        // h(u) -/+ pi/2 around the arc center (minus for left turns).
        const double cx = n.x0 - std::sin(n.h0) / n.kappa;
        const double cy = n.y0 + std::cos(n.h0) / n.kappa;
        const double rx = px - cx, ry = py - cy;
        if (rx != 0.0 || ry != 0.0) {
            const double phi = std::atan2(ry, rx);
            const double h = n.kappa > 0.0 ? phi + kPi / 2.0 : phi - kPi / 2.0;
            const double period = 2.0 * kPi / std::abs(n.kappa);
            double u = std::fmod((h - n.h0) / n.kappa, period);
            if (u < 0.0) u += period;
            if (u > 0.0 && u < n.len) consider(u);
        }
    }
    consider(n.len);
}

double Course::foot_point(double px, double py) const {
    double best_s = 0.0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const Node& n : nodes_) project_on(n, px, py, best_s, best_d2);
    if (best_d2 > kCourseCorridor * kCourseCorridor)
        throw std::domain_error("position " + std::to_string(std::sqrt(best_d2)) +
                                " m off the course centerline");
    return best_s;
}

double Course::lateral_offset(double px, double py, double s) const {
    const PointOnPath c = centerline_at(s);
    // Left normal of the road tangent.
    return -(px - c.x) * std::sin(c.heading) + (py - c.y) * std::cos(c.heading);
}

PreviewErrors Course::preview_errors(double x, double y, double psi, double v,
                                     double t_near, std::optional<double> t_far) const {
    const double nx = x + v * t_near * std::cos(psi);
    const double ny = y + v * t_near * std::sin(psi);
    const double s_near = foot_point(nx, ny);
    PreviewErrors e{lateral_offset(nx, ny, s_near), 0.0};
    if (t_far) {
        const double s_self = foot_point(x, y);
        const double s_far = std::min(s_self + v * *t_far, total_);
        e.e_theta = wrap_angle(centerline_at(s_far).heading - psi);
    }
    return e;
}

std::vector<double> Course::junctions() const {
    std::vector<double> out;
    for (size_t i = 1; i < nodes_.size(); ++i)
        if (nodes_[i].kappa != nodes_[i - 1].kappa) out.push_back(nodes_[i].s0);
    return out;
}

Course build_thesis_course() {
    return Course({{1000.0, 0.0}, {314.0, 1.0 / 200.0}, {500.0, 0.0}}, 3.6);
}

}  // namespace hgsim
