#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vinesense/vine_world.hpp"

namespace vinesense {

struct PocketView {
  std::string pocket_id;
  Side side = Side::Left;
  double exposed_fraction = 0.0;
  double gauge_pressure = 0.0;
  double estimated_force = 0.0;  // estimate_force of gauge_pressure
};

struct SessionCounters {
  std::uint64_t tick = 0;
  std::uint64_t epoch = 0;  // incremented by every reset
  std::uint64_t frames = 0;
  std::uint64_t dropped = 0;
  std::uint64_t commands = 0;
};

struct SessionSnapshot {
  double sim_time = 0.0;
  Mode controller_state = Mode::GrowingStraight;
  std::vector<Vec2d> body;  // centerline every 1 cm, base to tip
  Pose2d tip;
  double grown_length = 0.0;
  std::vector<PocketView> pockets;
  ActuatorCommand actuators;
  SessionCounters counters;
};

SessionSnapshot take_snapshot(const Simulation& sim, SessionCounters counters);

// Single-line record with keys t, state, body, pockets, actuators, counters.
std::string to_record(const SessionSnapshot& snap);

}  // namespace vinesense
