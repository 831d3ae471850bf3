#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nsql {

/// Failure categories raised as exceptions across the library.
enum class Errc {
  ParseError,
  DuplicateDbId,
  UnknownDbId,
  SchemaMismatch,
  DatabaseUnavailable,
  EmptyResult,
  ExecutionError,
  SelfJoinUnsupported,
  SetOperationUnsupported,
  AmbiguousColumn,
  UnknownName,
  ClauseOrderViolation,
  AdapterUnavailable,
  ProtocolError,
  UnknownToken,
  ConfigError,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  /// Message without the error-code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace nsql
