#include "vinesense/vine_world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vinesense/error.hpp"

namespace vinesense {

double exposed_fraction(double grown_length_cm, double start_arclength_cm, double length_cm) {
  // Growth accumulates per tick, so boundaries are hit with round-off; snap within 1e-9 cm.
  constexpr double kSnapCm = 1e-9;
  const double out = grown_length_cm - start_arclength_cm;
  if (out <= kSnapCm) return 0.0;
  if (out >= length_cm - kSnapCm) return 1.0;
  return out / length_cm;
}

namespace {

// Which side of the body the point p lies on, judged at its projection.
Side side_of(const RobotBody& body, const ArcProjection<double>& proj, const Vec2d& p) {
  const Vec2d tangent = body.pose_at(proj.arclength).tangent();
  return cross2<double>(tangent, p - proj.point) >= 0.0 ? Side::Left : Side::Right;
}

}  // namespace

std::vector<double> detect_contacts(const RobotBody& body, std::span<const PocketInstance> pockets,
                                    std::span<const Obstacle> obstacles, std::span<const Touch> touches,
                                    const ContactConfig& cfg) {
  std::vector<double> force(pockets.size(), 0.0);
  if (body.grown_length() <= 0.0) return force;

  for (const auto& ob : obstacles) {
    for (std::size_t i = 0; i < pockets.size(); ++i) {
      const auto& p = pockets[i];
      if (p.exposed_fraction <= 0.0) continue;
      const auto proj =
          body.nearest_point(ob.center, p.start_arclength_cm, p.start_arclength_cm + p.exposed_length_cm());
      const double penetration = ob.radius_cm + cfg.body_half_width_cm - proj.distance;
      if (penetration > 0.0 && side_of(body, proj, ob.center) == p.side)
        force[i] += ob.stiffness_n_per_cm * penetration;
    }
  }

  for (const auto& t : touches) {
    if (!(t.force_n > 0.0)) continue;
    if (t.pocket_id) {
      for (std::size_t i = 0; i < pockets.size(); ++i)
        if (pockets[i].pocket_id == *t.pocket_id && pockets[i].exposed_fraction > 0.0) force[i] += t.force_n;
      continue;
    }
    std::optional<std::size_t> best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pockets.size(); ++i) {
      const auto& p = pockets[i];
      if (p.exposed_fraction <= 0.0) continue;
      const auto proj =
          body.nearest_point(t.position, p.start_arclength_cm, p.start_arclength_cm + p.exposed_length_cm());
      // Distance to the pocket's outer surface, offset by the body half width.
      const bool same_side = side_of(body, proj, t.position) == p.side;
      const double gap = same_side ? std::abs(proj.distance - cfg.body_half_width_cm)
                                   : proj.distance + cfg.body_half_width_cm;
      if (gap < best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best && best_gap <= cfg.touch_capture_radius_cm) force[*best] += t.force_n;
  }
  return force;
}

double max_penetration(const RobotBody& body, std::span<const Obstacle> obstacles, double from_cm,
                       const ContactConfig& cfg) {
  double deepest = -std::numeric_limits<double>::infinity();
  const double total = body.grown_length();
  if (total <= 0.0) return deepest;
  from_cm = std::clamp(from_cm, 0.0, total);
  for (const auto& ob : obstacles)
    deepest = std::max(deepest, ob.radius_cm + cfg.body_half_width_cm - body.nearest_point(ob.center, from_cm, total).distance);
  return deepest;
}

std::optional<std::size_t> front_pocket(std::span<const PocketInstance> pockets, Side side, double threshold) {
  std::optional<std::size_t> front;
  for (std::size_t i = 0; i < pockets.size(); ++i) {
    const auto& p = pockets[i];
    if (p.side != side || p.exposed_fraction <= 0.0 || p.exposed_fraction < threshold) continue;
    if (!front || p.start_arclength_cm > pockets[*front].start_arclength_cm) front = i;
  }
  return front;
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  if (!(growth_rate_cm_per_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "growth rate must be > 0");
  if (!(steer_window_cm >= 0.0)) throw Error(ErrorCode::InvalidArgument, "steer window must be >= 0");
  if (!(eversion_threshold > 0.0 && eversion_threshold <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "eversion threshold must lie in (0, 1]");
  if (!(steering.kappa_max > 0.0) || !(steering.kappa_gain > 0.0) || !(steering.steer_pressure_max > 0.0))
    throw Error(ErrorCode::InvalidArgument, "steering parameters must be positive");
  if (!(contact.body_half_width_cm >= 0.0) || !(contact.touch_capture_radius_cm >= 0.0) ||
      !(contact.max_penetration_cm >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "contact parameters must be >= 0");
  if (layout.pockets_per_side < 0 || 2 * layout.pockets_per_side > SensorHub::kMaxSensors)
    throw Error(ErrorCode::CapacityExceeded, "too many pockets for one hub");
  if (!(layout.pitch_cm > 0.0)) throw Error(ErrorCode::InvalidArgument, "pocket pitch must be > 0");
}

Simulation::Simulation(WorldSetup setup) : setup_(std::move(setup)), controller_(setup_.controller), rng_(setup_.seed) {
  setup_.sim.validate();
  controller_.validate();
  for (const auto& ob : setup_.obstacles)
    if (!(ob.radius_cm > 0.0) || !(ob.stiffness_n_per_cm > 0.0))
      throw Error(ErrorCode::InvalidArgument, "obstacle radius and stiffness must be positive");
  std::stable_sort(setup_.touches.begin(), setup_.touches.end(),
                   [](const ScheduledTouch& a, const ScheduledTouch& b) { return a.at_s < b.at_s; });

  const auto& layout = setup_.sim.layout;
  sensitivity_ = sensitivity_for(layout.config, layout.contact);
  const double p0 = layout.config.initial_pressure_kpa;

  body_.base = setup_.base;
  if (setup_.initial_length_cm > 0.0) body_ = grow(std::move(body_), setup_.initial_length_cm, 0.0);

  for (Side side : {Side::Left, Side::Right}) {
    for (int k = 0; k < layout.pockets_per_side; ++k) {
      PocketInstance p;
      p.pocket_id = std::string(side == Side::Left ? "L" : "R") + std::to_string(k);
      p.side = side;
      p.index = k;
      p.start_arclength_cm = layout.first_start_cm + k * layout.pitch_cm;
      p.length_cm = layout.config.pre_inflated_length_cm;
      p.gauge_pressure_kpa = p0;
      pockets_.push_back(p);
      responses_.emplace_back(p0, sensitivity_, setup_.sim.dynamics);
    }
  }
  for (std::size_t i = 0; i < pockets_.size(); ++i) {
    const int n = static_cast<int>(i);
    hub_.attach({n / SensorHub::kChannelsPerMux, n % SensorHub::kChannelsPerMux, pockets_[i].pocket_id},
                [this, i] { return pockets_[i].gauge_pressure_kpa; });
  }
  update_exposure();

  state_ = ControllerState{setup_.initial_mode, 0.0, std::nullopt};
  command_ = command_for(state_.mode, controller_);
  last_.state = state_;
  last_.command = command_;
}

void Simulation::update_exposure() {
  const double grown = body_.grown_length();
  for (auto& p : pockets_) p.exposed_fraction = exposed_fraction(grown, p.start_arclength_cm, p.length_cm);
}

RobotBody Simulation::shaped(double curvature, bool grow_tip) const {
  const auto& sim = setup_.sim;
  RobotBody b = reshape_distal(body_, sim.steer_window_cm, curvature);
  if (grow_tip) b = grow(std::move(b), sim.growth_rate_cm_per_s * sim.dt, curvature);
  return b;
}

void Simulation::apply_touch(const Touch& touch) {
  if (!(touch.force_n >= 0.0) || !(touch.duration_s > 0.0))
    throw Error(ErrorCode::InvalidArgument, "touch needs force >= 0 and duration > 0");
  active_.push_back(touch);
  touch_remaining_.push_back(touch.duration_s);
}

void Simulation::set_controller_config(const ControllerConfig& cfg) {
  cfg.validate();
  controller_ = cfg;
}

const TickRecord& Simulation::tick() {
  const auto& sim = setup_.sim;
  ++ticks_;
  const double now = time();

  // The body moves over (now - dt, now] under the command chosen at the end
  // of the previous tick; sensing and the controller then run at `now`.
  //
  // Bend as commanded unless that drives the tip window deeper than an
  // obstacle yields; then back the curvature off until it just slides along.
  const double kappa = steer(command_.left_pressure, command_.right_pressure, sim.steering);
  RobotBody next = shaped(kappa, command_.grow);
  if (kappa != 0.0 && !setup_.obstacles.empty()) {
    const double cap = sim.contact.max_penetration_cm;
    const double from = body_.grown_length() - sim.steer_window_cm;
    auto depth = [&](const RobotBody& b) { return max_penetration(b, setup_.obstacles, from, sim.contact); };
    if (depth(next) > cap) {
      RobotBody straight = shaped(0.0, command_.grow);
      if (depth(straight) > cap) {
        if (depth(straight) < depth(next)) next = std::move(straight);
      } else {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 30; ++it) {
          const double mid = 0.5 * (lo + hi);
          (depth(shaped(mid * kappa, command_.grow)) <= cap ? lo : hi) = mid;
        }
        next = shaped(lo * kappa, command_.grow);
      }
    }
  }
  body_ = std::move(next);
  update_exposure();

  while (next_scheduled_ < setup_.touches.size() && setup_.touches[next_scheduled_].at_s <= now + kTimeSlack)
    apply_touch(setup_.touches[next_scheduled_++].touch);

  const auto forces = detect_contacts(body_, pockets_, setup_.obstacles, active_, sim.contact);
  for (std::size_t i = 0; i < pockets_.size(); ++i) {
    pockets_[i].current_force_n = forces[i];
    pockets_[i].gauge_pressure_kpa = std::max(0.0, responses_[i].advance(forces[i], sim.dt, rng_));
  }

  for (auto& r : touch_remaining_) r -= sim.dt;
  for (std::size_t i = active_.size(); i-- > 0;) {
    if (touch_remaining_[i] <= kTimeSlack) {
      active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(i));
      touch_remaining_.erase(touch_remaining_.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }

  const auto readings = hub_.poll_cycle(now);
  auto reading_for = [&](Side side) {
    const auto front = front_pocket(pockets_, side, sim.eversion_threshold);
    if (!front) return 0.0;
    for (const auto& r : readings)
      if (r.logical_id == pockets_[*front].pocket_id) return r.gauge_pressure_kpa;
    return 0.0;
  };
  const double fl = reading_for(Side::Left);
  const double fr = reading_for(Side::Right);

  const auto result = step(state_, fl, fr, now, controller_);
  state_ = result.state;
  command_ = result.command;

  last_ = TickRecord{ticks_, now, state_, command_, result.trigger, fl, fr};
  return last_;
}

}  // namespace vinesense
