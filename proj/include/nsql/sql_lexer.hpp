#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nsql {

enum class TokenKind { Identifier, QuotedIdentifier, Number, String, Symbol, End };

struct SqlToken {
  TokenKind kind = TokenKind::End;
  /// Identifier and symbol spelling, number spelling, or unescaped string contents.
  std::string text;
  std::size_t offset = 0;

  bool is_word(std::string_view upper) const;
  bool is_symbol(std::string_view sym) const { return kind == TokenKind::Symbol && text == sym; }
};

/// Tokenizes standard SQL. Both quote styles produce String tokens; backticks and
/// brackets produce QuotedIdentifier. Throws Error(ParseError) on stray characters.
std::vector<SqlToken> lex_sql(std::string_view sql);

}  // namespace nsql
