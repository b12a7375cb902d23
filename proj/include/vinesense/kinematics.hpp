#pragma once

// Planar constant-curvature arc kinematics. Positive curvature bends left
// (counter-clockwise).

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vinesense {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
using Vec2d = Vec2<double>;

template <typename Scalar>
struct Pose2 {
  Vec2<Scalar> position = Vec2<Scalar>::Zero();
  Scalar heading = Scalar(0);  // radians from +x

  Vec2<Scalar> tangent() const { return {std::cos(heading), std::sin(heading)}; }
  Vec2<Scalar> left_normal() const { return {-std::sin(heading), std::cos(heading)}; }
};
using Pose2d = Pose2<double>;

template <typename Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// sin(x)/x, accurate near zero.
template <typename Scalar>
Scalar sinc(Scalar x) {
  if (std::abs(x) < Scalar(1e-4)) return Scalar(1) - x * x / Scalar(6);
  return std::sin(x) / x;
}

// Pose after travelling `length` along an arc of constant curvature.
template <typename Scalar>
Pose2<Scalar> advance_arc(const Pose2<Scalar>& start, Scalar length, Scalar curvature) {
  const Scalar half = curvature * length / Scalar(2);
  const Scalar chord = length * sinc(half);
  Pose2<Scalar> end;
  end.position = start.position + chord * Vec2<Scalar>(std::cos(start.heading + half), std::sin(start.heading + half));
  end.heading = start.heading + curvature * length;
  return end;
}

template <typename Scalar>
struct ArcProjection {
  Scalar arclength = Scalar(0);  // from the arc start
  Scalar distance = Scalar(0);
  Vec2<Scalar> point = Vec2<Scalar>::Zero();
};

// Closest point of a finite arc to p.
template <typename Scalar>
ArcProjection<Scalar> project_onto_arc(const Pose2<Scalar>& start, Scalar length, Scalar curvature,
                                       const Vec2<Scalar>& p) {
  auto at = [&](Scalar s) {
    ArcProjection<Scalar> r;
    r.arclength = s;
    r.point = advance_arc(start, s, curvature).position;
    r.distance = (p - r.point).norm();
    return r;
  };
  if (length <= Scalar(0)) return at(Scalar(0));

  if (std::abs(curvature) * length < Scalar(1e-9)) {
    const Scalar s = std::clamp((p - start.position).dot(start.tangent()), Scalar(0), length);
    return at(s);
  }

  auto best = at(Scalar(0));
  auto end = at(length);
  if (end.distance < best.distance) best = end;

  const Vec2<Scalar> center = start.position + start.left_normal() / curvature;
  const Vec2<Scalar> d = p - center;
  if (d.norm() == Scalar(0)) return best;

  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  const Scalar sgn = curvature > Scalar(0) ? Scalar(1) : Scalar(-1);
  const Scalar phi0 = start.heading - sgn * std::numbers::pi_v<Scalar> / Scalar(2);
  Scalar delta = std::remainder(std::atan2(d.y(), d.x()) - phi0, two_pi);
  // Sweep angle measured in the direction of travel, in [0, 2*pi).
  delta *= sgn;
  if (delta < Scalar(0)) delta += two_pi;
  const Scalar s = delta / std::abs(curvature);
  if (s <= length) {
    auto mid = at(s);
    if (mid.distance < best.distance) best = mid;
  }
  return best;
}

}  // namespace vinesense
