#include "vinesense/commands.hpp"

#include <cmath>

#include <json.hpp>

namespace vinesense {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::Touch: return "touch";
    case CommandKind::Pause: return "pause";
    case CommandKind::Resume: return "resume";
    case CommandKind::Reset: return "reset";
    case CommandKind::Config: return "config";
  }
  return "pause";
}

ControllerConfig ConfigPatch::applied_to(ControllerConfig cfg) const {
  if (grow_timeout_s) cfg.grow_timeout_s = *grow_timeout_s;
  if (search_timeout_s) cfg.search_timeout_s = *search_timeout_s;
  if (contact_threshold_kpa) cfg.contact_threshold_kpa = *contact_threshold_kpa;
  if (steer_pressure) cfg.steer_pressure = *steer_pressure;
  return cfg;
}

Command parse_command(std::string_view line) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::exception&) {
    throw CommandError("", ErrorCode::MalformedCommand, "not a JSON record");
  }
  if (!rec.is_object()) throw CommandError("", ErrorCode::MalformedCommand, "command must be an object");

  Command cmd;
  if (rec.contains("req")) {
    const auto& r = rec["req"];
    cmd.req = r.is_string() ? r.get<std::string>() : r.dump();
  }
  auto fail = [&](const std::string& detail) { throw CommandError(cmd.req, ErrorCode::MalformedCommand, detail); };
  auto number = [&](const char* key) -> std::optional<double> {
    if (!rec.contains(key)) return std::nullopt;
    if (!rec[key].is_number()) fail(std::string("'") + key + "' must be a number");
    const double v = rec[key].get<double>();
    if (!std::isfinite(v)) fail(std::string("'") + key + "' must be finite");
    return v;
  };

  if (!rec.contains("kind") || !rec["kind"].is_string()) fail("missing 'kind'");
  const auto kind = rec["kind"].get<std::string>();
  if (kind == "touch") {
    cmd.kind = CommandKind::Touch;
    const auto force = number("force_n");
    const auto duration = number("duration_s");
    if (!force) fail("touch needs force_n");
    if (*force < 0.0 || *force > kMaxTouchForce_n) fail("force_n must lie in [0, 50]");
    const double d = duration.value_or(1.0);
    if (!(d > 0.0) || d > kMaxTouchDuration_s) fail("duration_s must lie in (0, 60]");
    cmd.touch.force_n = *force;
    cmd.touch.duration_s = d;
    if (rec.contains("pocket")) {
      if (!rec["pocket"].is_string()) fail("'pocket' must be a string");
      cmd.touch.pocket_id = rec["pocket"].get<std::string>();
    } else {
      const auto x = number("x");
      const auto y = number("y");
      if (!x || !y) fail("touch needs x and y or pocket");
      cmd.touch.position = Vec2d(*x, *y);
    }
  } else if (kind == "pause") {
    cmd.kind = CommandKind::Pause;
  } else if (kind == "resume") {
    cmd.kind = CommandKind::Resume;
  } else if (kind == "reset") {
    cmd.kind = CommandKind::Reset;
  } else if (kind == "config") {
    cmd.kind = CommandKind::Config;
    cmd.config.grow_timeout_s = number("grow_timeout_s");
    cmd.config.search_timeout_s = number("search_timeout_s");
    cmd.config.contact_threshold_kpa = number("contact_threshold_kpa");
    cmd.config.steer_pressure = number("steer_pressure");
    try {
      cmd.config.applied_to({}).validate();
    } catch (const Error& e) {
      fail(e.detail());
    }
  } else {
    fail("unknown kind '" + kind + "'");
  }
  return cmd;
}

std::string ack_record(const std::string& req, CommandKind kind) {
  ojson rec;
  rec["req"] = req;
  rec["ack"] = std::string(to_string(kind));
  return rec.dump();
}

std::string error_record(const std::string& req, ErrorCode code, const std::string& detail) {
  ojson rec;
  rec["req"] = req;
  rec["error"] = std::string(to_string(code));
  rec["detail"] = detail;
  return rec.dump();
}

}  // namespace vinesense
