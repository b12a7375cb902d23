#pragma once

// Planar vine robot world: body kinematics, side-mounted pocket sensors,
// obstacle and touch contact, pressure synthesis through the pocket model,
// the emulated sensor hub, and the contact-search controller, advanced in
// fixed ticks.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vinesense/contact_controller.hpp"
#include "vinesense/pocket_model.hpp"
#include "vinesense/sensor_hub.hpp"
#include "vinesense/vine_body.hpp"

namespace vinesense {

struct PocketInstance {
  std::string pocket_id;  // "L0", "R2", ...
  Side side = Side::Left;
  int index = 0;  // along the side, 0 nearest the base
  double start_arclength_cm = 0.0;
  double length_cm = 27.5;
  double exposed_fraction = 0.0;
  double current_force_n = 0.0;
  double gauge_pressure_kpa = 0.0;

  double exposed_length_cm() const { return exposed_fraction * length_cm; }
};

struct Obstacle {
  Vec2d center = Vec2d::Zero();
  double radius_cm = 1.0;
  double stiffness_n_per_cm = 4.0;
};

struct Touch {
  Vec2d position = Vec2d::Zero();
  std::optional<std::string> pocket_id;  // targets a pocket directly when set
  double force_n = 0.0;
  double duration_s = 1.0;
};

struct ContactConfig {
  double body_half_width_cm = 20.3 / 3.141592653589793;  // main tube radius
  double touch_capture_radius_cm = 6.0;
  // Obstacles yield elastically up to this depth; past it they deflect the
  // steered tip instead of letting the body pass through.
  double max_penetration_cm = 1.0;
};

// Deepest obstacle penetration of the body over arclength [from, tip].
double max_penetration(const RobotBody& body, std::span<const Obstacle> obstacles, double from_cm,
                       const ContactConfig& cfg);

double exposed_fraction(double grown_length_cm, double start_arclength_cm, double length_cm);

// Per-pocket contact force, parallel to `pockets`. Each exposed pocket feels
// its own deepest indentation into an obstacle on its side; touches
// load the nearest exposed pocket within the capture radius. Unexposed
// pockets never receive force.
std::vector<double> detect_contacts(const RobotBody& body, std::span<const PocketInstance> pockets,
                                    std::span<const Obstacle> obstacles, std::span<const Touch> touches,
                                    const ContactConfig& cfg);

// Index of the front pocket on a side: the exposed pocket with the largest
// start arclength whose exposed fraction reaches the threshold.
std::optional<std::size_t> front_pocket(std::span<const PocketInstance> pockets, Side side, double threshold);

struct PocketLayout {
  int pockets_per_side = 3;
  double first_start_cm = 0.0;
  double pitch_cm = 27.5;
  PocketConfig config = PocketConfig::sealed();
  ContactSpec contact;  // contact the sensitivity is evaluated for
};

struct SimConfig {
  double dt = 0.05;
  double growth_rate_cm_per_s = 27.5 / 12.0;
  double steer_window_cm = 27.5;
  double eversion_threshold = 0.9;
  SteeringConfig steering;
  ContactConfig contact;
  DynamicsConfig dynamics;
  PocketLayout layout;

  void validate() const;
};

struct ScheduledTouch {
  double at_s = 0.0;
  Touch touch;
};

struct WorldSetup {
  SimConfig sim;
  ControllerConfig controller;
  std::uint64_t seed = 1;
  Pose2d base{Vec2d::Zero(), 3.141592653589793 / 2.0};
  double initial_length_cm = 0.0;
  Mode initial_mode = Mode::GrowingStraight;
  std::vector<Obstacle> obstacles;
  std::vector<ScheduledTouch> touches;
};

struct TickRecord {
  std::uint64_t tick = 0;
  double t = 0.0;
  ControllerState state;
  ActuatorCommand command;
  std::optional<Trigger> trigger;
  double front_left_kpa = 0.0;
  double front_right_kpa = 0.0;
};

class Simulation {
 public:
  explicit Simulation(WorldSetup setup);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // steer/grow under the last command -> contacts -> pocket pressures -> hub
  // poll -> controller
  const TickRecord& tick();

  void apply_touch(const Touch& touch);
  void set_controller_config(const ControllerConfig& cfg);

  double time() const { return static_cast<double>(ticks_) * setup_.sim.dt; }
  std::uint64_t ticks() const { return ticks_; }
  const WorldSetup& setup() const { return setup_; }
  const RobotBody& body() const { return body_; }
  const std::vector<PocketInstance>& pockets() const { return pockets_; }
  const ControllerState& controller_state() const { return state_; }
  const ControllerConfig& controller_config() const { return controller_; }
  const ActuatorCommand& command() const { return command_; }
  const TickRecord& last() const { return last_; }
  const SensorHub& hub() const { return hub_; }
  const Sensitivity& pocket_sensitivity() const { return sensitivity_; }
  std::span<const Touch> active_touches() const { return active_; }

 private:
  void update_exposure();
  RobotBody shaped(double curvature, bool grow_tip) const;

  WorldSetup setup_;
  ControllerConfig controller_;
  RobotBody body_;
  std::vector<PocketInstance> pockets_;
  std::vector<PocketResponse> responses_;
  Sensitivity sensitivity_;
  SensorHub hub_;
  Rng rng_;
  ControllerState state_;
  ActuatorCommand command_;
  std::vector<Touch> active_;
  std::vector<double> touch_remaining_;
  std::size_t next_scheduled_ = 0;
  std::uint64_t ticks_ = 0;
  TickRecord last_;
};

}  // namespace vinesense
