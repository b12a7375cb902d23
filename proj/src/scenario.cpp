#include "vinesense/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <numbers>

#include <json.hpp>

#include "vinesense/error.hpp"

namespace vinesense {

using json = nlohmann::json;

namespace {

class RecordReader {
 public:
  RecordReader(const json& rec, int line) : rec_(rec), line_(line) {}

  template <typename T>
  void read(const char* key, T& out) {
    used_.emplace(key);
    if (!rec_.contains(key)) return;
    try {
      out = rec_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(std::string("bad value for '") + key + "'");
    }
  }

  bool has(const char* key) const { return rec_.contains(key); }

  void finish() const {
    for (const auto& [k, v] : rec_.items())
      if (k != "type" && !used_.count(k)) fail("unknown key '" + k + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ScenarioParse, "line " + std::to_string(line_) + ": " + msg);
  }

 private:
  const json& rec_;
  int line_;
  std::set<std::string, std::less<>> used_;
};

}  // namespace

Scenario parse_scenario(std::istream& in, std::string name) {
  Scenario sc;
  sc.name = std::move(name);
  auto& setup = sc.setup;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ScenarioParse, "line " + std::to_string(line_no) + ": not a JSON record");
    }
    if (!rec.is_object() || !rec.contains("type") || !rec["type"].is_string())
      throw Error(ErrorCode::ScenarioParse, "line " + std::to_string(line_no) + ": record needs a string \"type\"");
    RecordReader r(rec, line_no);
    const auto type = rec["type"].get<std::string>();

    if (type == "world") {
      r.read("seed", setup.seed);
      r.read("dt", setup.sim.dt);
      r.read("duration_s", sc.duration_s);
      r.read("initial_length_cm", setup.initial_length_cm);
      std::string mode = std::string(to_string(setup.initial_mode));
      r.read("initial_state", mode);
      auto m = parse_mode(mode);
      if (!m) r.fail("unknown initial_state '" + mode + "'");
      setup.initial_mode = *m;
      json base = json::object();
      r.read("base", base);
      if (!base.is_object()) r.fail("base must be an object");
      double heading_deg = setup.base.heading * 180.0 / std::numbers::pi;
      RecordReader b(base, line_no);
      b.read("x", setup.base.position.x());
      b.read("y", setup.base.position.y());
      b.read("heading_deg", heading_deg);
      b.finish();
      setup.base.heading = heading_deg * std::numbers::pi / 180.0;
      if (!(setup.sim.dt > 0.0)) r.fail("dt must be > 0");
      if (!(sc.duration_s >= 0.0)) r.fail("duration_s must be >= 0");
      if (!(setup.initial_length_cm >= 0.0)) r.fail("initial_length_cm must be >= 0");
    } else if (type == "controller") {
      auto& c = setup.controller;
      r.read("grow_timeout_s", c.grow_timeout_s);
      r.read("search_timeout_s", c.search_timeout_s);
      r.read("contact_threshold_kpa", c.contact_threshold_kpa);
      r.read("steer_pressure", c.steer_pressure);
      try {
        c.validate();
      } catch (const Error& e) {
        r.fail(e.detail());
      }
    } else if (type == "steering") {
      auto& s = setup.sim.steering;
      r.read("kappa_max", s.kappa_max);
      r.read("kappa_gain", s.kappa_gain);
      r.read("steer_pressure_max", s.steer_pressure_max);
    } else if (type == "sim") {
      auto& s = setup.sim;
      r.read("growth_rate_cm_per_s", s.growth_rate_cm_per_s);
      r.read("steer_window_cm", s.steer_window_cm);
      r.read("eversion_threshold", s.eversion_threshold);
      r.read("body_half_width_cm", s.contact.body_half_width_cm);
      r.read("touch_capture_radius_cm", s.contact.touch_capture_radius_cm);
      r.read("max_penetration_cm", s.contact.max_penetration_cm);
      r.read("time_constant_s", s.dynamics.time_constant_s);
      r.read("noise_sigma_kpa", s.dynamics.noise_sigma_kpa);
      r.read("pockets_per_side", s.layout.pockets_per_side);
      r.read("pocket_pitch_cm", s.layout.pitch_cm);
    } else if (type == "obstacle") {
      Obstacle ob;
      r.read("x", ob.center.x());
      r.read("y", ob.center.y());
      r.read("radius_cm", ob.radius_cm);
      r.read("stiffness_n_per_cm", ob.stiffness_n_per_cm);
      if (!(ob.radius_cm > 0.0) || !(ob.stiffness_n_per_cm > 0.0))
        r.fail("obstacle radius and stiffness must be positive");
      setup.obstacles.push_back(ob);
    } else if (type == "touch") {
      ScheduledTouch st;
      r.read("t", st.at_s);
      r.read("x", st.touch.position.x());
      r.read("y", st.touch.position.y());
      if (r.has("pocket")) {
        std::string id;
        r.read("pocket", id);
        st.touch.pocket_id = id;
      }
      r.read("force_n", st.touch.force_n);
      r.read("duration_s", st.touch.duration_s);
      if (!(st.touch.force_n >= 0.0) || !(st.touch.duration_s > 0.0))
        r.fail("touch needs force_n >= 0 and duration_s > 0");
      setup.touches.push_back(st);
    } else {
      r.fail("unknown record type '" + type + "'");
    }
    r.finish();
  }
  try {
    setup.sim.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ScenarioParse, e.detail());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ScenarioParse, "cannot open " + path.string());
  return parse_scenario(in, path.stem().string());
}

}  // namespace vinesense
