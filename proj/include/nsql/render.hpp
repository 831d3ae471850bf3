#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "nsql/sql_ast.hpp"

namespace nsql {

enum class LexemeClass {
  ClauseKeyword,
  Keyword,
  Aggregation,
  Connective,
  Comparison,
  Operator,
  Column,
  Table,
  Star,
  Constant,
  Punctuation,
};

struct Lexeme {
  std::string text;
  LexemeClass cls;
};

/// Body lexemes of each of the seven clause lines, in canonical order.
using ClauseLexemes = std::array<std::vector<Lexeme>, 7>;

ClauseLexemes render_clauses(const NormalizedQuery& q);

/// Canonical Normalized SQL: seven lines, single spaces, trailing newline.
std::string render(const NormalizedQuery& q);

/// One line without the newline: the keyword, then the body lexemes.
std::string render_line(ClauseKind kind, const std::vector<Lexeme>& body);

std::string quote_string(std::string_view text);

/// SQL accepted by SQLite: the normalized text with bare-keyword lines removed.
std::string executable_sql(std::string_view normalized_text);

}  // namespace nsql
