#include "vinesense/vine_body.hpp"

#include <algorithm>
#include <limits>

#include "vinesense/error.hpp"

namespace vinesense {

double RobotBody::grown_length() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.length_cm;
  return total;
}

Pose2d RobotBody::pose_at(double arclength) const {
  Pose2d pose = base;
  double remaining = std::max(arclength, 0.0);
  for (const auto& s : segments) {
    if (remaining <= s.length_cm) return advance_arc(pose, remaining, s.curvature);
    pose = advance_arc(pose, s.length_cm, s.curvature);
    remaining -= s.length_cm;
  }
  return pose;
}

std::vector<Pose2d> RobotBody::joint_poses() const {
  std::vector<Pose2d> out;
  out.reserve(segments.size() + 1);
  Pose2d pose = base;
  out.push_back(pose);
  for (const auto& s : segments) {
    pose = advance_arc(pose, s.length_cm, s.curvature);
    out.push_back(pose);
  }
  return out;
}

std::vector<Vec2d> RobotBody::polyline(double spacing_cm) const {
  if (!(spacing_cm > 0.0)) throw Error(ErrorCode::InvalidArgument, "polyline spacing must be positive");
  std::vector<Vec2d> out;
  out.push_back(base.position);
  Pose2d seg_start = base;
  double seg_offset = 0.0;  // arclength at seg_start
  double next = spacing_cm;
  for (const auto& s : segments) {
    while (next <= seg_offset + s.length_cm) {
      out.push_back(advance_arc(seg_start, next - seg_offset, s.curvature).position);
      next += spacing_cm;
    }
    seg_start = advance_arc(seg_start, s.length_cm, s.curvature);
    seg_offset += s.length_cm;
  }
  if ((out.back() - seg_start.position).norm() > 1e-12) out.push_back(seg_start.position);
  return out;
}

ArcProjection<double> RobotBody::nearest_point(const Vec2d& p, double from, double to) const {
  ArcProjection<double> best;
  best.distance = std::numeric_limits<double>::infinity();
  Pose2d pose = base;
  double offset = 0.0;
  for (const auto& s : segments) {
    const double lo = std::max(from, offset);
    const double hi = std::min(to, offset + s.length_cm);
    if (lo <= hi) {
      const Pose2d sub = advance_arc(pose, lo - offset, s.curvature);
      auto r = project_onto_arc(sub, hi - lo, s.curvature, p);
      if (r.distance < best.distance) {
        best = r;
        best.arclength += lo;
      }
    }
    pose = advance_arc(pose, s.length_cm, s.curvature);
    offset += s.length_cm;
  }
  if (!std::isfinite(best.distance)) {
    best.arclength = 0.0;
    best.point = base.position;
    best.distance = (p - base.position).norm();
  }
  return best;
}

RobotBody grow(RobotBody body, double dL, double curvature) {
  if (!(dL >= 0.0)) throw Error(ErrorCode::InvalidArgument, "growth must be non-negative");
  if (dL == 0.0) return body;
  if (!body.segments.empty() && body.segments.back().curvature == curvature)
    body.segments.back().length_cm += dL;
  else
    body.segments.push_back({dL, curvature});
  return body;
}

RobotBody truncate(RobotBody body, double length_cm) {
  double kept = 0.0;
  std::size_t i = 0;
  for (; i < body.segments.size(); ++i) {
    auto& s = body.segments[i];
    if (kept + s.length_cm >= length_cm) {
      s.length_cm = length_cm - kept;
      if (s.length_cm > 0.0) ++i;
      break;
    }
    kept += s.length_cm;
  }
  body.segments.resize(i);
  return body;
}

RobotBody reshape_distal(RobotBody body, double window_cm, double curvature) {
  const double total = body.grown_length();
  const double window = std::clamp(window_cm, 0.0, total);
  if (window == 0.0) return body;
  // Already a single arc of this curvature over the window.
  if (!body.segments.empty() && body.segments.back().curvature == curvature &&
      body.segments.back().length_cm >= window)
    return body;
  body = truncate(std::move(body), total - window);
  return grow(std::move(body), window, curvature);
}

double steer(double left_pressure, double right_pressure, const SteeringConfig& cfg) {
  if (!(left_pressure >= 0.0) || !(right_pressure >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "actuator pressures must be >= 0");
  const double k = cfg.kappa_gain * (left_pressure - right_pressure) / cfg.steer_pressure_max;
  return std::clamp(k, -cfg.kappa_max, cfg.kappa_max);
}

}  // namespace vinesense
