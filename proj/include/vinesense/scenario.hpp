#pragma once

// Replayable demo scenarios. One JSON record per line, selected by "type":
//
//   world      seed, dt, duration_s, initial_length_cm, initial_state, base {x, y, heading_deg}
//   controller grow_timeout_s, search_timeout_s, contact_threshold_kpa, steer_pressure
//   steering   kappa_max, kappa_gain, steer_pressure_max
//   sim        growth_rate_cm_per_s, steer_window_cm, eversion_threshold, body_half_width_cm,
//              touch_capture_radius_cm, time_constant_s, noise_sigma_kpa, pockets_per_side,
//              pocket_pitch_cm, max_penetration_cm
//   obstacle   x, y, radius_cm, stiffness_n_per_cm
//   touch      t, force_n, duration_s, and either x, y or pocket
//
// Blank lines and lines starting with '#' are skipped. Every field is
// optional; unknown types or keys are errors.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "vinesense/vine_world.hpp"

namespace vinesense {

struct Scenario {
  std::string name;
  WorldSetup setup;
  double duration_s = 120.0;
};

// Throws Error(ScenarioParse) naming the offending line.
Scenario parse_scenario(std::istream& in, std::string name = {});
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace vinesense
