#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vinesense/kinematics.hpp"
#include "vinesense/vine_body.hpp"

using namespace vinesense;

namespace {

// Brute-force oracle: sample the arc densely by direct trigonometry.
ArcProjection<double> sampled_projection(const Pose2d& start, double length, double kappa, const Vec2d& p, int n) {
  ArcProjection<double> best;
  best.distance = INFINITY;
  for (int i = 0; i <= n; ++i) {
    const double s = length * i / n;
    Vec2d q;
    if (kappa == 0.0) {
      q = start.position + s * start.tangent();
    } else {
      const Vec2d c = start.position + start.left_normal() / kappa;
      const double a = start.heading - std::numbers::pi / 2 + kappa * s;
      q = c + Vec2d(std::cos(a), std::sin(a)) / kappa;
    }
    const double d = (p - q).norm();
    if (d < best.distance) best = {s, d, q};
  }
  return best;
}

}  // namespace

TEST_CASE("straight growth from an empty body") {
  RobotBody b;
  b.base = Pose2d{Vec2d(1.0, 2.0), std::numbers::pi / 2};
  b = grow(b, 27.5, 0.0);
  REQUIRE(b.segments.size() == 1);
  CHECK(b.segments[0].length_cm == 27.5);
  CHECK(b.tip().position.x() == doctest::Approx(1.0));
  CHECK(b.tip().position.y() == doctest::Approx(29.5));
  CHECK(b.tip().heading == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("constant-curvature growth turns the tip by kappa times length") {
  for (double kappa : {1.0 / 40, -1.0 / 40, 0.003, 1.0 / 7}) {
    RobotBody b;
    b = grow(b, 33.0, kappa);
    CHECK(b.tip().heading == doctest::Approx(kappa * 33.0).epsilon(1e-14));
    // The tip stays on the circle of radius 1/kappa around the turn center.
    const Vec2d c = b.base.position + b.base.left_normal() / kappa;
    CHECK((b.tip().position - c).norm() == doctest::Approx(1.0 / std::abs(kappa)).epsilon(1e-12));
  }
  // Growing in pieces lands where growing at once does.
  RobotBody a, c;
  a = grow(a, 30.0, 0.02);
  for (int i = 0; i < 30; ++i) c = grow(c, 1.0, 0.02);
  CHECK(c.segments.size() == 1);
  CHECK((a.tip().position - c.tip().position).norm() < 1e-12);
}

TEST_CASE("arc projection matches dense sampling") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-60.0, 60.0), k(-0.1, 0.1), h(-3.0, 3.0), len(0.5, 80.0);
  for (int trial = 0; trial < 300; ++trial) {
    const Pose2d start{Vec2d(u(rng) / 4, u(rng) / 4), h(rng)};
    const double kappa = trial % 10 == 0 ? 0.0 : k(rng);
    const double length = len(rng);
    const Vec2d p(u(rng), u(rng));
    const auto fast = project_onto_arc(start, length, kappa, p);
    const auto slow = sampled_projection(start, length, kappa, p, 20000);
    CAPTURE(trial);
    // Sampling can only overestimate, by at most half a sample step.
    CHECK(fast.distance <= slow.distance + 1e-9);
    CHECK(fast.distance >= slow.distance - length / 20000);
    CHECK((fast.point - advance_arc(start, fast.arclength, kappa).position).norm() < 1e-9);
  }
}

TEST_CASE("body nearest point respects the arclength window") {
  RobotBody b;
  b = grow(b, 20.0, 0.0);
  b = grow(b, 20.0, 0.05);
  b = grow(b, 20.0, -0.03);
  const Vec2d p(15.0, 40.0);
  const auto all = b.nearest_point(p);
  double best = INFINITY;
  for (int i = 0; i <= 60000; ++i) best = std::min(best, (b.pose_at(i * 1e-3).position - p).norm());
  CHECK(all.distance == doctest::Approx(best).epsilon(1e-6));

  const auto window = b.nearest_point(p, 0.0, 10.0);
  CHECK(window.arclength <= 10.0 + 1e-12);
}

TEST_CASE("bodies stay C1 through every joint") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> k(-1.0 / 40, 1.0 / 40), d(0.05, 3.0);
  RobotBody b;
  for (int i = 0; i < 400; ++i) {
    const double kappa = k(rng);
    if (i % 7 == 3) b = reshape_distal(b, 27.5, kappa);
    b = grow(b, d(rng), kappa);
  }
  REQUIRE(b.segments.size() > 10);
  double s = 0.0;
  const double eps = 1e-10;
  for (std::size_t i = 0; i + 1 < b.segments.size(); ++i) {
    s += b.segments[i].length_cm;
    const auto before = b.pose_at(s - eps);
    const auto after = b.pose_at(s + eps);
    CHECK((before.position - after.position).norm() < 1e-9);
    CHECK(std::abs(before.heading - after.heading) < 1e-9);
  }
  const auto joints = b.joint_poses();
  CHECK(joints.size() == b.segments.size() + 1);
  CHECK((joints.back().position - b.tip().position).norm() < 1e-9);
}

TEST_CASE("reshape keeps length and the proximal body") {
  RobotBody b;
  b = grow(b, 50.0, 0.0);
  const auto mid = b.pose_at(20.0);
  b = reshape_distal(b, 27.5, 1.0 / 40);
  CHECK(b.grown_length() == doctest::Approx(50.0).epsilon(1e-15));
  CHECK((b.pose_at(20.0).position - mid.position).norm() < 1e-12);
  CHECK(b.tip().heading == doctest::Approx(27.5 / 40).epsilon(1e-12));
  b = reshape_distal(b, 27.5, 0.0);
  CHECK(b.tip().heading == doctest::Approx(0.0));
  // Windows longer than the body bend all of it.
  RobotBody s;
  s = grow(s, 10.0, 0.0);
  s = reshape_distal(s, 27.5, 0.05);
  CHECK(s.tip().heading == doctest::Approx(0.5));
}

TEST_CASE("truncate") {
  RobotBody b;
  b = grow(b, 10.0, 0.0);
  b = grow(b, 10.0, 0.1);
  CHECK(truncate(b, 15.0).grown_length() == doctest::Approx(15.0));
  CHECK(truncate(b, 10.0).segments.size() == 1);
  CHECK(truncate(b, 0.0).segments.empty());
}

TEST_CASE("polyline spacing and endpoints") {
  RobotBody b;
  b = grow(b, 10.5, 0.0);
  b = grow(b, 5.0, 0.1);
  const auto pts = b.polyline(1.0);
  CHECK(pts.size() == 17);  // base, 15 interior samples, tip
  CHECK((pts.front() - b.base.position).norm() == 0.0);
  CHECK((pts.back() - b.tip().position).norm() < 1e-12);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK((pts[i] - pts[i - 1]).norm() <= 1.0 + 1e-12);
}

TEST_CASE("steering curvature") {
  const SteeringConfig cfg;
  CHECK(steer(0.7, 0.7, cfg) == 0.0);
  CHECK(steer(1.0, 0.0, cfg) == cfg.kappa_max);
  CHECK(steer(0.0, 1.0, cfg) == -cfg.kappa_max);
  CHECK(steer(5.0, 0.0, cfg) == cfg.kappa_max);
  CHECK(steer(0.5, 0.0, cfg) == doctest::Approx(cfg.kappa_gain / 2));
  CHECK(cfg.min_wrap_diameter_cm() == doctest::Approx(80.0));
  CHECK_THROWS(steer(-1.0, 0.0, cfg));
}
