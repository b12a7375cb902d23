#include "vinesense/snapshot.hpp"

#include <json.hpp>

namespace vinesense {

using ojson = nlohmann::ordered_json;

SessionSnapshot take_snapshot(const Simulation& sim, SessionCounters counters) {
  SessionSnapshot s;
  s.sim_time = sim.time();
  s.controller_state = sim.controller_state().mode;
  s.body = sim.body().polyline(1.0);
  s.tip = sim.body().tip();
  s.grown_length = sim.body().grown_length();
  const auto& sens = sim.pocket_sensitivity();
  for (const auto& p : sim.pockets()) {
    const double p0 = sim.setup().sim.layout.config.initial_pressure_kpa;
    s.pockets.push_back({p.pocket_id, p.side, p.exposed_fraction, p.gauge_pressure_kpa,
                         estimate_force({p0, p.gauge_pressure_kpa}, sens)});
  }
  s.actuators = sim.command();
  counters.tick = sim.ticks();
  counters.frames = sim.hub().cycles();
  s.counters = counters;
  return s;
}

std::string to_record(const SessionSnapshot& snap) {
  ojson rec;
  rec["t"] = snap.sim_time;
  rec["state"] = std::string(to_string(snap.controller_state));
  ojson points = ojson::array();
  for (const auto& p : snap.body) points.push_back({p.x(), p.y()});
  rec["body"] = {{"points", std::move(points)},
                 {"tip", {{"x", snap.tip.position.x()}, {"y", snap.tip.position.y()}, {"heading", snap.tip.heading}}},
                 {"grown_length", snap.grown_length}};
  ojson pockets = ojson::array();
  for (const auto& p : snap.pockets) {
    pockets.push_back({{"pocket_id", p.pocket_id},
                       {"side", std::string(to_string(p.side))},
                       {"exposed_fraction", p.exposed_fraction},
                       {"gauge_pressure", p.gauge_pressure},
                       {"estimated_force", p.estimated_force}});
  }
  rec["pockets"] = std::move(pockets);
  rec["actuators"] = {{"grow", snap.actuators.grow},
                      {"left", snap.actuators.left_pressure},
                      {"right", snap.actuators.right_pressure}};
  rec["counters"] = {{"tick", snap.counters.tick},
                     {"epoch", snap.counters.epoch},
                     {"frames", snap.counters.frames},
                     {"dropped", snap.counters.dropped},
                     {"commands", snap.counters.commands}};
  return rec.dump();
}

}  // namespace vinesense
