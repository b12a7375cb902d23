#pragma once

// Five-state contact search: grow straight, sweep left then right looking
// for contact on the front pocket of the steered side, and grow toward a
// detected contact one pocket length at a time.

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace vinesense {

enum class Mode { GrowingStraight, SearchingLeft, SearchingRight, GrowingLeft, GrowingRight };
enum class Side { Left, Right };

// growing_straight, searching_left, ...
std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);
std::string_view to_string(Side side);

struct ControllerState {
  Mode mode = Mode::GrowingStraight;
  double entered_at = 0.0;
  std::optional<Side> prior_contact_side;  // set while the last growth was contact driven

  bool operator==(const ControllerState&) const = default;
};

struct ControllerConfig {
  double grow_timeout_s = 12.0;
  double search_timeout_s = 15.0;
  double contact_threshold_kpa = 1.01;  // gauge pressure, not the change
  double steer_pressure = 1.0;

  void validate() const;
};

struct ActuatorCommand {
  bool grow = false;
  double left_pressure = 0.0;
  double right_pressure = 0.0;

  bool operator==(const ActuatorCommand&) const = default;
};

enum class Trigger {
  Contact,              // threshold crossing
  GrowthTimeout,        // grew one pocket length
  SearchTimeout,        // no contact while searching
  SearchTimeoutAfterRightContact,
};

struct StepResult {
  ControllerState state;
  ActuatorCommand command;
  std::optional<Trigger> trigger;
};

// Timeouts compare elapsed >= limit, with this slack for accumulated clock
// rounding.
inline constexpr double kTimeSlack = 1e-9;

ActuatorCommand command_for(Mode mode, const ControllerConfig& cfg);

// Pure transition function: at most one transition per call.
StepResult step(const ControllerState& state, double front_left_kpa, double front_right_kpa, double now_s,
                const ControllerConfig& cfg);

struct FrontReadings {
  double left_kpa = 0.0;
  double right_kpa = 0.0;
};

struct TraceEntry {
  double t = 0.0;
  ControllerState state;
};

// Sample i is evaluated at t = (i + 1) * dt.
std::vector<TraceEntry> run_trace(std::span<const FrontReadings> script, double dt, const ControllerConfig& cfg,
                                  ControllerState initial = {});

// Modes in order of entry, consecutive repeats collapsed.
std::vector<Mode> mode_sequence(std::span<const TraceEntry> trace);

// Contact-driven growth episodes in a mode sequence: total count, and the
// longest run not interrupted by growing straight.
struct WrapEpisodes {
  std::size_t total = 0;
  std::size_t longest_run = 0;
};
WrapEpisodes wrap_episodes(std::span<const Mode> sequence);

}  // namespace vinesense
