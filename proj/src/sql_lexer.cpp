#include "nsql/sql_lexer.hpp"

#include <cctype>

#include <fmt/format.h>

#include "nsql/error.hpp"
#include "nsql/schema.hpp"

namespace nsql {

bool SqlToken::is_word(std::string_view upper) const { return kind == TokenKind::Identifier && iequals(text, upper); }

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<SqlToken> lex_sql(std::string_view sql) {
  std::vector<SqlToken> out;
  std::size_t i = 0;
  const std::size_t n = sql.size();
  while (i < n) {
    char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (ident_start(c)) {
      while (i < n && ident_char(sql[i])) ++i;
      out.push_back({TokenKind::Identifier, std::string(sql.substr(start, i - start)), start});
      continue;
    }
    if (digit(c) || (c == '.' && i + 1 < n && digit(sql[i + 1]))) {
      while (i < n && digit(sql[i])) ++i;
      if (i < n && sql[i] == '.') {
        ++i;
        while (i < n && digit(sql[i])) ++i;
      }
      if (i < n && (sql[i] == 'e' || sql[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (sql[j] == '+' || sql[j] == '-')) ++j;
        if (j < n && digit(sql[j])) {
          i = j;
          while (i < n && digit(sql[i])) ++i;
        }
      }
      out.push_back({TokenKind::Number, std::string(sql.substr(start, i - start)), start});
      continue;
    }
    if (c == '\'' || c == '"') {
      std::string text;
      ++i;
      bool closed = false;
      while (i < n) {
        if (sql[i] == c) {
          if (i + 1 < n && sql[i + 1] == c) {
            text += c;
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        text += sql[i++];
      }
      if (!closed) throw Error(Errc::ParseError, fmt::format("unterminated string at offset {}", start));
      out.push_back({TokenKind::String, std::move(text), start});
      continue;
    }
    if (c == '`' || c == '[') {
      char close = c == '`' ? '`' : ']';
      auto end = sql.find(close, i + 1);
      if (end == std::string_view::npos)
        throw Error(Errc::ParseError, fmt::format("unterminated identifier at offset {}", start));
      out.push_back({TokenKind::QuotedIdentifier, std::string(sql.substr(i + 1, end - i - 1)), start});
      i = end + 1;
      continue;
    }
    static constexpr std::string_view two_char[] = {"!=", "<>", "<=", ">=", "=="};
    bool matched = false;
    for (auto sym : two_char) {
      if (sql.substr(i, 2) == sym) {
        out.push_back({TokenKind::Symbol, std::string(sym), start});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("(),.*=<>;+-/%").find(c) != std::string_view::npos) {
      out.push_back({TokenKind::Symbol, std::string(1, c), start});
      ++i;
      continue;
    }
    throw Error(Errc::ParseError, fmt::format("unexpected character '{}' at offset {}", c, start));
  }
  out.push_back({TokenKind::End, "", n});
  return out;
}

}  // namespace nsql
