#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vinesense {

enum class ErrorCode {
  UnsupportedConfig,
  InvalidArgument,
  DegenerateData,
  MalformedRow,
  MissingColumn,
  AddressInUse,
  CapacityExceeded,
  EmptyHub,
  SinkClosed,
  ScenarioParse,
  MalformedCommand,
  NotOwner,
};

// Upper-case wire name, e.g. "UNSUPPORTED_CONFIG".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace vinesense
