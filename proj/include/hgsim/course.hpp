#pragma once

#include <optional>
#include <vector>

namespace hgsim {

// Wrap an angle into (-pi, pi].
double wrap_angle(double a);

// Piecewise course description: a segment is either a straight (curvature 0)
// or a circular arc (curvature = 1/R, positive = left turn).
struct Segment {
    double length;     // m, > 0
    double curvature;  // 1/m
};

struct PointOnPath {
    double x;
    double y;
    double heading;    // rad, world frame, tangent direction
    double curvature;  // 1/m
};

// Two-point preview errors.  e_y is the lateral displacement of the near
// preview point from the lane centerline, positive to the LEFT of the road
// tangent.  e_theta is road tangent at the far point minus vehicle heading,
// wrapped to (-pi, pi]; it is 0 when the far point is disabled.
struct PreviewErrors {
    double e_y;
    double e_theta;
};

// A query point farther than this from the centerline is treated as having
// left the course.
inline constexpr double kCourseCorridor = 50.0;  // m

class Course {
public:
    // Throws ConfigError on empty segment list, non-positive lengths or lane
    // width, or non-finite curvature.  The course starts at (x0, y0) with
    // tangent direction heading0.
    Course(std::vector<Segment> segments, double lane_width,
           double x0 = 0.0, double y0 = 0.0, double heading0 = 0.0);

    double total_length() const { return total_; }
    double lane_width() const { return lane_width_; }
    const std::vector<Segment>& segments() const { return segs_; }

    // Centerline pose at arc length s in [0, total_length].  At an interior
    // junction the following segment wins, so curvature jumps exactly at the
    // junction arc length.
    PointOnPath centerline_at(double s) const;

    // Arc length of the centerline point nearest to (px, py).  Ties resolve
    // toward smaller s.  Throws std::domain_error when the point is farther
    // than kCourseCorridor from the course.
    double foot_point(double px, double py) const;

    // Signed lateral displacement of (px, py) from the centerline point at
    // arc length s, positive to the left of the road tangent.
    double lateral_offset(double px, double py, double s) const;

    // Preview errors for a vehicle at (x, y) with heading psi moving at
    // speed v.  The near point sits v*t_near ahead along the heading; the far
    // point sits v*t_far ahead along the path from the vehicle's foot point
    // (clamped to the course end).  t_far == nullopt disables the far point.
    PreviewErrors preview_errors(double x, double y, double psi, double v,
                                 double t_near, std::optional<double> t_far) const;

    // Arc lengths of interior junctions where curvature changes.
    std::vector<double> junctions() const;

private:
    struct Node {
        double s0;      // arc length at segment start
        double x0, y0;  // segment start position
        double h0;      // segment start heading
        double len;
        double kappa;
    };

    const Node& node_at(double s) const;
    PointOnPath point_on(const Node& n, double u) const;  // u = local arc length
    // Best (s, squared distance) candidate within one segment; smaller s wins ties.
    void project_on(const Node& n, double px, double py, double& best_s,
                    double& best_d2) const;

    std::vector<Segment> segs_;
    std::vector<Node> nodes_;
    double lane_width_ = 0.0;
    double total_ = 0.0;
};

// The lane-following course used throughout: 1000 m straight approach, a
// 314 m left arc of radius 200 m, and a 500 m exit straight; 3.6 m lane.
Course build_thesis_course();

}  // namespace hgsim
