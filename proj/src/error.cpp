#include "vinesense/error.hpp"

namespace vinesense {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedConfig: return "UNSUPPORTED_CONFIG";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::DegenerateData: return "DEGENERATE_DATA";
    case ErrorCode::MalformedRow: return "MALFORMED_ROW";
    case ErrorCode::MissingColumn: return "MISSING_COLUMN";
    case ErrorCode::AddressInUse: return "ADDRESS_IN_USE";
    case ErrorCode::CapacityExceeded: return "CAPACITY_EXCEEDED";
    case ErrorCode::EmptyHub: return "EMPTY_HUB";
    case ErrorCode::SinkClosed: return "SINK_CLOSED";
    case ErrorCode::ScenarioParse: return "SCENARIO_PARSE";
    case ErrorCode::MalformedCommand: return "MALFORMED_COMMAND";
    case ErrorCode::NotOwner: return "NOT_OWNER";
  }
  return "UNKNOWN";
}

}  // namespace vinesense
