#pragma once

// Command records accepted by a live session:
//   {"req": id, "kind": "touch", "force_n": N, "duration_s": s, "x": cm, "y": cm}
//   {"req": id, "kind": "touch", "force_n": N, "duration_s": s, "pocket": "R0"}
//   {"req": id, "kind": "pause" | "resume" | "reset"}
//   {"req": id, "kind": "config", <any ControllerConfig field>}
// Replies are {"req", "ack"} or {"req", "error", "detail"}.

#include <optional>
#include <string>
#include <string_view>

#include "vinesense/error.hpp"
#include "vinesense/vine_world.hpp"

namespace vinesense {

inline constexpr double kMaxTouchForce_n = 50.0;
inline constexpr double kMaxTouchDuration_s = 60.0;

enum class CommandKind { Touch, Pause, Resume, Reset, Config };

std::string_view to_string(CommandKind kind);

struct ConfigPatch {
  std::optional<double> grow_timeout_s;
  std::optional<double> search_timeout_s;
  std::optional<double> contact_threshold_kpa;
  std::optional<double> steer_pressure;

  ControllerConfig applied_to(ControllerConfig cfg) const;
};

struct Command {
  std::string req;
  CommandKind kind = CommandKind::Pause;
  Touch touch;
  ConfigPatch config;
};

// Thrown by parse_command; carries whatever request id could be read.
class CommandError : public Error {
 public:
  CommandError(std::string req, ErrorCode code, const std::string& detail)
      : Error(code, detail), req_(std::move(req)) {}
  const std::string& req() const { return req_; }

 private:
  std::string req_;
};

Command parse_command(std::string_view line);

std::string ack_record(const std::string& req, CommandKind kind);
std::string error_record(const std::string& req, ErrorCode code, const std::string& detail);

}  // namespace vinesense
