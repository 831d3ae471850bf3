#include "nsql/partial.hpp"

#include <fmt/format.h>

#include "nsql/error.hpp"

namespace nsql {

ClauseKind PartialParse::current_clause() const {
  if (!lines.empty() && !lines.back().terminated) return lines.back().kind;
  return kClauseOrder[std::min(lines.size(), kClauseOrder.size() - 1)];
}

const ClauseLine* PartialParse::find(ClauseKind kind) const {
  for (const auto& line : lines)
    if (line.kind == kind) return &line;
  return nullptr;
}

bool PartialParse::clause_complete(ClauseKind kind) const {
  const auto* line = find(kind);
  return line && line->terminated;
}

namespace {

// Length of a lexeme starting at `pos`; quoted strings may contain spaces.
// Sets `closed` false when a quote is still open at the end of `body`.
std::size_t lexeme_length(std::string_view body, std::size_t pos, bool& closed) {
  closed = true;
  std::size_t j = pos;
  if (body[pos] == '\'') {
    closed = false;
    j = pos + 1;
    while (j < body.size()) {
      if (body[j] == '\'') {
        if (j + 1 < body.size() && body[j + 1] == '\'') {
          j += 2;
          continue;
        }
        ++j;
        closed = true;
        break;
      }
      ++j;
    }
    if (!closed) return body.size() - pos;
  }
  while (j < body.size() && body[j] != ' ') ++j;
  return j - pos;
}

struct LineScan {
  std::vector<std::string> lexemes;
  std::string fragment;
  std::optional<std::pair<std::size_t, std::string>> error;
};

LineScan scan_body(std::string_view body, bool terminated) {
  LineScan scan;
  std::size_t pos = 0;
  while (pos < body.size()) {
    if (body[pos] == ' ') {
      scan.error = {scan.lexemes.size(), "double space"};
      return scan;
    }
    bool closed = true;
    std::size_t len = lexeme_length(body, pos, closed);
    std::string lexeme(body.substr(pos, len));
    pos += len;
    if (pos == body.size()) {
      if (!terminated) {
        scan.fragment = std::move(lexeme);
      } else if (!closed) {
        scan.error = {scan.lexemes.size(), "unterminated string"};
      } else {
        scan.lexemes.push_back(std::move(lexeme));
      }
      return scan;
    }
    scan.lexemes.push_back(std::move(lexeme));
    ++pos;
    if (pos == body.size() && terminated) scan.error = {scan.lexemes.size(), "trailing space"};
  }
  return scan;
}

// Clause keyword that starts `line` and is followed by a space, or equals the whole line when `whole` is set.
std::optional<ClauseKind> leading_keyword(std::string_view line, bool whole) {
  for (auto kind : kClauseOrder) {
    auto kw = keyword(kind);
    if (line.size() > kw.size() && line.substr(0, kw.size()) == kw && line[kw.size()] == ' ') return kind;
    if (whole && line == kw) return kind;
  }
  return std::nullopt;
}

}  // namespace

PartialParse parse_partial(std::string_view text, bool eos) {
  PartialParse out;
  out.eos = eos;
  std::size_t start = 0;
  std::size_t index = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    bool terminated = nl != std::string_view::npos;
    std::string_view line = text.substr(start, terminated ? nl - start : std::string_view::npos);
    if (!terminated && line.empty()) break;
    if (index >= kClauseOrder.size()) {
      out.layout_error = LayoutError{index, 0, "text after the LIMIT line"};
      break;
    }
    ClauseKind expected = kClauseOrder[index];
    auto kind = leading_keyword(line, terminated);
    if (kind && *kind != expected)
      throw Error(Errc::ClauseOrderViolation,
                  fmt::format("line {} starts with {} where {} is expected", index + 1, keyword(*kind), keyword(expected)));
    if (!kind) {
      auto kw = keyword(expected);
      if (!terminated && kw.substr(0, line.size()) == line) {
        out.keyword_progress = std::string(line);
      } else {
        out.layout_error = LayoutError{index, 0, fmt::format("line {} does not start with {}", index + 1, kw)};
      }
      break;
    }
    ClauseLine clause{expected, {}, terminated};
    std::string_view kw = keyword(expected);
    if (line.size() > kw.size()) {
      std::string_view body = line.substr(kw.size() + 1);
      if (terminated && body.empty()) {
        out.lines.push_back(std::move(clause));
        out.layout_error = LayoutError{index, 0, "trailing space"};
        break;
      }
      auto scan = scan_body(body, terminated);
      clause.lexemes = std::move(scan.lexemes);
      out.fragment = std::move(scan.fragment);
      if (scan.error) {
        out.lines.push_back(std::move(clause));
        out.layout_error = LayoutError{index, scan.error->first, scan.error->second};
        break;
      }
    }
    out.lines.push_back(std::move(clause));
    if (!terminated) break;
    start = nl + 1;
    ++index;
  }
  out.is_complete = eos && !out.layout_error && out.lines.size() == kClauseOrder.size() &&
                    out.lines.back().terminated && out.keyword_progress.empty();
  return out;
}

std::optional<std::size_t> find_order_violation(std::string_view text) {
  std::size_t start = 0;
  for (std::size_t index = 0; start < text.size() && index < kClauseOrder.size(); ++index) {
    auto nl = text.find('\n', start);
    bool terminated = nl != std::string_view::npos;
    auto line = text.substr(start, terminated ? nl - start : std::string_view::npos);
    auto kind = leading_keyword(line, terminated);
    if (kind && *kind != kClauseOrder[index]) return index;
    if (!kind || !terminated) break;
    start = nl + 1;
  }
  return std::nullopt;
}

std::vector<std::string> split_surface_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = pos;
    if (text[pos] == '\'') {
      end = pos + 1;
      while (end < text.size()) {
        if (text[end] == '\'') {
          if (end + 1 < text.size() && text[end + 1] == '\'') {
            end += 2;
            continue;
          }
          ++end;
          break;
        }
        if (text[end] == '\n') break;
        ++end;
      }
    }
    while (end < text.size() && text[end] != ' ' && text[end] != '\n') ++end;
    if (end < text.size()) ++end;
    out.emplace_back(text.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

}  // namespace nsql
