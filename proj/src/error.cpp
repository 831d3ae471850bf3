#include "nsql/error.hpp"

namespace nsql {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::ParseError: return "ParseError";
    case Errc::DuplicateDbId: return "DuplicateDbId";
    case Errc::UnknownDbId: return "UnknownDbId";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::DatabaseUnavailable: return "DatabaseUnavailable";
    case Errc::EmptyResult: return "EmptyResult";
    case Errc::ExecutionError: return "ExecutionError";
    case Errc::SelfJoinUnsupported: return "SelfJoinUnsupported";
    case Errc::SetOperationUnsupported: return "SetOperationUnsupported";
    case Errc::AmbiguousColumn: return "AmbiguousColumn";
    case Errc::UnknownName: return "UnknownName";
    case Errc::ClauseOrderViolation: return "ClauseOrderViolation";
    case Errc::AdapterUnavailable: return "AdapterUnavailable";
    case Errc::ProtocolError: return "ProtocolError";
    case Errc::UnknownToken: return "UnknownToken";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace nsql
