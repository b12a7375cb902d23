#pragma once

// Everting vine body as a chain of constant-curvature arcs frozen behind a
// growing tip.

#include <vector>

#include "vinesense/kinematics.hpp"

namespace vinesense {

struct ArcSegment {
  double length_cm = 0.0;
  double curvature = 0.0;  // 1/cm, positive bends left
};

struct RobotBody {
  std::vector<ArcSegment> segments;
  Pose2d base;
  double main_tube_lay_flat_cm = 20.3;

  double grown_length() const;
  Pose2d pose_at(double arclength) const;
  Pose2d tip() const { return pose_at(grown_length()); }

  // Start pose of every segment followed by the tip pose.
  std::vector<Pose2d> joint_poses() const;

  // Centerline points from base to tip, every `spacing` cm plus the tip.
  std::vector<Vec2d> polyline(double spacing_cm = 1.0) const;

  // Closest centerline point to p with arclength in [from, to].
  ArcProjection<double> nearest_point(const Vec2d& p, double from, double to) const;
  ArcProjection<double> nearest_point(const Vec2d& p) const { return nearest_point(p, 0.0, grown_length()); }
};

// Extends the tip by dL at the given curvature. Material behind the tip is
// untouched; a new segment starts whenever the curvature changes.
RobotBody grow(RobotBody body, double dL, double curvature);

// Re-bends the distal `window` cm of the body to one arc of the given
// curvature, without changing its length.
RobotBody reshape_distal(RobotBody body, double window_cm, double curvature);

// Cuts the body back to `length` cm.
RobotBody truncate(RobotBody body, double length_cm);

struct SteeringConfig {
  double kappa_max = 1.0 / 40.0;   // 1/cm
  double kappa_gain = 1.0 / 40.0;  // 1/cm at full differential pressure
  double steer_pressure_max = 1.0;

  double min_wrap_diameter_cm() const { return 2.0 / kappa_max; }
};

// Curvature command from the two actuator pressures, clamped to +/-kappa_max.
double steer(double left_pressure, double right_pressure, const SteeringConfig& cfg);

}  // namespace vinesense
