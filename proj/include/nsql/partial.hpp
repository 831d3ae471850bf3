#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nsql/sql_ast.hpp"

namespace nsql {

struct ClauseLine {
  ClauseKind kind;
  /// Completed body lexemes (the keyword itself excluded).
  std::vector<std::string> lexemes;
  /// The line ended with a newline.
  bool terminated = false;
};

/// Departure from the canonical layout; `line`/`lexeme` locate it.
struct LayoutError {
  std::size_t line = 0;
  std::size_t lexeme = 0;
  std::string message;
};

struct PartialParse {
  /// Lines whose keyword is complete. Only the last may be unterminated.
  std::vector<ClauseLine> lines;
  /// Text of a clause keyword still being typed at the start of a new line.
  std::string keyword_progress;
  /// Trailing lexeme not yet followed by a space or newline.
  std::string fragment;
  bool eos = false;
  bool is_complete = false;
  std::optional<LayoutError> layout_error;

  /// Clause the next lexeme belongs to.
  ClauseKind current_clause() const;
  const ClauseLine* find(ClauseKind kind) const;
  bool clause_complete(ClauseKind kind) const;
};

/// Splits possibly incomplete Normalized SQL into clause lines. Throws
/// Error(ClauseOrderViolation) when a line starts with an out-of-order clause keyword.
PartialParse parse_partial(std::string_view text, bool eos = false);

/// Index of the first line that starts with an out-of-order clause keyword.
std::optional<std::size_t> find_order_violation(std::string_view text);

/// Lexemes with their following separator, e.g. "SELECT ", "AVG ", ")\n".
std::vector<std::string> split_surface_tokens(std::string_view text);

}  // namespace nsql
