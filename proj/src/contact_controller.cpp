#include "vinesense/contact_controller.hpp"

#include <algorithm>
#include <cmath>

#include "vinesense/error.hpp"

namespace vinesense {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::GrowingStraight: return "growing_straight";
    case Mode::SearchingLeft: return "searching_left";
    case Mode::SearchingRight: return "searching_right";
    case Mode::GrowingLeft: return "growing_left";
    case Mode::GrowingRight: return "growing_right";
  }
  return "growing_straight";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (auto m : {Mode::GrowingStraight, Mode::SearchingLeft, Mode::SearchingRight, Mode::GrowingLeft,
                 Mode::GrowingRight})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

std::string_view to_string(Side side) { return side == Side::Left ? "left" : "right"; }

void ControllerConfig::validate() const {
  if (!(grow_timeout_s > 0.0) || !(search_timeout_s > 0.0) || !(contact_threshold_kpa > 0.0) ||
      !(steer_pressure > 0.0))
    throw Error(ErrorCode::InvalidArgument, "controller parameters must be positive");
}

ActuatorCommand command_for(Mode mode, const ControllerConfig& cfg) {
  switch (mode) {
    case Mode::GrowingStraight: return {true, 0.0, 0.0};
    case Mode::SearchingLeft: return {false, cfg.steer_pressure, 0.0};
    case Mode::SearchingRight: return {false, 0.0, cfg.steer_pressure};
    case Mode::GrowingLeft: return {true, cfg.steer_pressure, 0.0};
    case Mode::GrowingRight: return {true, 0.0, cfg.steer_pressure};
  }
  return {};
}

StepResult step(const ControllerState& state, double front_left_kpa, double front_right_kpa, double now_s,
                const ControllerConfig& cfg) {
  if (!std::isfinite(front_left_kpa) || !std::isfinite(front_right_kpa))
    throw Error(ErrorCode::InvalidArgument, "front readings must be finite");
  if (now_s + kTimeSlack < state.entered_at) throw Error(ErrorCode::InvalidArgument, "time went backwards");

  const double elapsed = now_s - state.entered_at;
  auto enter = [&](Mode m, std::optional<Side> prior, Trigger why) {
    ControllerState next{m, now_s, prior};
    return StepResult{next, command_for(m, cfg), why};
  };
  auto stay = [&] { return StepResult{state, command_for(state.mode, cfg), std::nullopt}; };

  switch (state.mode) {
    case Mode::GrowingStraight:
      if (elapsed + kTimeSlack >= cfg.grow_timeout_s)
        return enter(Mode::SearchingLeft, std::nullopt, Trigger::GrowthTimeout);
      return stay();

    case Mode::SearchingLeft:
      if (front_left_kpa >= cfg.contact_threshold_kpa) return enter(Mode::GrowingLeft, Side::Left, Trigger::Contact);
      if (elapsed + kTimeSlack >= cfg.search_timeout_s) {
        if (state.prior_contact_side == Side::Left)
          return enter(Mode::GrowingStraight, std::nullopt, Trigger::SearchTimeout);
        return enter(Mode::SearchingRight, std::nullopt, Trigger::SearchTimeout);
      }
      return stay();

    case Mode::SearchingRight:
      if (front_right_kpa >= cfg.contact_threshold_kpa)
        return enter(Mode::GrowingRight, Side::Right, Trigger::Contact);
      if (elapsed + kTimeSlack >= cfg.search_timeout_s) {
        const auto why =
            state.prior_contact_side == Side::Right ? Trigger::SearchTimeoutAfterRightContact : Trigger::SearchTimeout;
        return enter(Mode::GrowingStraight, std::nullopt, why);
      }
      return stay();

    case Mode::GrowingLeft:
      if (elapsed + kTimeSlack >= cfg.grow_timeout_s)
        return enter(Mode::SearchingLeft, Side::Left, Trigger::GrowthTimeout);
      return stay();

    case Mode::GrowingRight:
      if (elapsed + kTimeSlack >= cfg.grow_timeout_s)
        return enter(Mode::SearchingRight, Side::Right, Trigger::GrowthTimeout);
      return stay();
  }
  return stay();
}

std::vector<TraceEntry> run_trace(std::span<const FrontReadings> script, double dt, const ControllerConfig& cfg,
                                  ControllerState initial) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  cfg.validate();
  std::vector<TraceEntry> trace;
  trace.reserve(script.size());
  ControllerState state = initial;
  for (std::size_t i = 0; i < script.size(); ++i) {
    const double now = static_cast<double>(i + 1) * dt;
    state = step(state, script[i].left_kpa, script[i].right_kpa, now, cfg).state;
    trace.push_back({now, state});
  }
  return trace;
}

std::vector<Mode> mode_sequence(std::span<const TraceEntry> trace) {
  std::vector<Mode> out;
  for (const auto& e : trace)
    if (out.empty() || out.back() != e.state.mode) out.push_back(e.state.mode);
  return out;
}

WrapEpisodes wrap_episodes(std::span<const Mode> sequence) {
  WrapEpisodes out;
  std::size_t run = 0;
  for (Mode m : sequence) {
    if (m == Mode::GrowingLeft || m == Mode::GrowingRight) {
      ++out.total;
      out.longest_run = std::max(out.longest_run, ++run);
    } else if (m == Mode::GrowingStraight) {
      run = 0;
    }
  }
  return out;
}

}  // namespace vinesense
