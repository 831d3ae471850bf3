#include "nsql/checker.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include <fmt/format.h>

#include "nsql/error.hpp"
#include "nsql/normalize.hpp"

namespace nsql {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "Syntax";
    case ErrorKind::Runtime: return "Runtime";
    case ErrorKind::Example: return "Example";
  }
  return "";
}

CheckVerdict CheckVerdict::reject(ErrorKind kind, ClauseKind clause, std::size_t line, std::size_t lexeme,
                                  std::string detail) {
  return {false, kind, clause, line, lexeme, std::move(detail)};
}

bool CheckVerdict::before(const CheckVerdict& other) const {
  if (pass) return false;
  if (other.pass) return true;
  if (line != other.line) return line < other.line;
  if (lexeme != other.lexeme) return lexeme < other.lexeme;
  return static_cast<int>(kind) < static_cast<int>(other.kind);
}

namespace {

enum class Context { Select, From, Where, GroupBy, OrderBy, Limit, Subquery };

Context context_of(ClauseKind clause) {
  switch (clause) {
    case ClauseKind::Select: return Context::Select;
    case ClauseKind::From: return Context::From;
    case ClauseKind::Where:
    case ClauseKind::Having: return Context::Where;
    case ClauseKind::GroupBy: return Context::GroupBy;
    case ClauseKind::OrderBy: return Context::OrderBy;
    case ClauseKind::Limit: return Context::Limit;
  }
  return Context::Select;
}

const std::vector<std::string>& keywords_of(Context ctx) {
  static const std::array<std::vector<std::string>, 7> table = [] {
    std::vector<std::string> aggs = {"COUNT", "SUM", "AVG", "MIN", "MAX"};
    auto with = [&](std::vector<std::string> base, bool add_aggs) {
      if (add_aggs) base.insert(base.end(), aggs.begin(), aggs.end());
      std::sort(base.begin(), base.end());
      base.erase(std::unique(base.begin(), base.end()), base.end());
      return base;
    };
    std::array<std::vector<std::string>, 7> t;
    t[0] = with({"DISTINCT", "(", ")", ",", "*"}, true);
    t[1] = with({"JOIN", "ON", "AND", "="}, false);
    t[2] = with({"DISTINCT", "(", ")", "*", "=", "!=", "<", "<=", ">", ">=", "LIKE", "NOT", "IN", "BETWEEN", "AND",
                 "OR", "SELECT"},
                true);
    t[3] = with({","}, false);
    t[4] = with({"DISTINCT", "(", ")", "*", ",", "ASC", "DESC"}, true);
    t[5] = {};
    t[6] = with({"DISTINCT", "(", ")", "*", ",", "=", "!=", "<", "<=", ">", ">=", "LIKE", "NOT", "IN", "BETWEEN",
                 "AND", "OR", "SELECT", "FROM", "WHERE", "GROUP", "BY", "HAVING", "ORDER", "LIMIT", "JOIN", "ON", "ASC",
                 "DESC"},
                true);
    return t;
  }();
  return table[static_cast<std::size_t>(ctx)];
}

bool allows_refs(Context ctx) { return ctx != Context::Limit; }
bool allows_tables(Context ctx) { return ctx == Context::From || ctx == Context::Subquery; }
bool allows_constants(Context ctx) { return ctx == Context::Where || ctx == Context::Subquery; }

constexpr std::string_view kSqlWords[] = {"SELECT", "FROM", "WHERE",  "GROUP", "BY",      "HAVING", "ORDER",
                                          "LIMIT",  "JOIN", "ON",     "AND",   "OR",      "NOT",    "IN",
                                          "LIKE",   "BETWEEN", "DISTINCT", "ASC", "DESC", "COUNT",  "SUM",
                                          "AVG",    "MIN",  "MAX",    "AS",    "UNION",   "INTERSECT", "EXCEPT"};

bool is_sql_word(std::string_view lex) {
  return std::find(std::begin(kSqlWords), std::end(kSqlWords), lex) != std::end(kSqlWords);
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

bool is_identifier(std::string_view s) {
  return !s.empty() && ident_start(s[0]) && std::all_of(s.begin(), s.end(), ident_char);
}

bool is_ref_shape(std::string_view s) {
  auto dot = s.find('.');
  if (dot == std::string_view::npos || s.find('.', dot + 1) != std::string_view::npos) return false;
  return is_identifier(s.substr(0, dot)) && is_identifier(s.substr(dot + 1));
}

bool is_number(std::string_view s, bool integer_only) {
  std::size_t i = 0;
  if (!integer_only && i < s.size() && s[i] == '-') ++i;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  if (digits == 0) return false;
  if (i < s.size() && s[i] == '.' && !integer_only) {
    ++i;
    std::size_t frac = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++frac;
    if (frac == 0) return false;
  }
  return i == s.size();
}

bool is_number_prefix(std::string_view s, bool integer_only) {
  std::size_t i = 0;
  if (!integer_only && i < s.size() && s[i] == '-') ++i;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  if (i < s.size() && s[i] == '.' && !integer_only && digits > 0) {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  }
  return i == s.size() && !s.empty() && (digits > 0 || !integer_only);
}

bool is_string_constant(std::string_view s) {
  if (s.size() < 2 || s.front() != '\'' || s.back() != '\'') return false;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] != '\'') continue;
    if (i + 2 < s.size() && s[i + 1] == '\'') {
      ++i;
      continue;
    }
    return false;
  }
  return true;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

}  // namespace

struct VocabularyIndex {
  std::set<std::string, std::less<>> refs;    // lowercase table.column
  std::set<std::string, std::less<>> tables;  // lowercase

  explicit VocabularyIndex(const DatabaseSchema& schema) {
    for (const auto& t : schema.tables) {
      tables.insert(to_lower(t.name));
      for (const auto& c : t.columns) refs.insert(to_lower(t.name + "." + c.name));
    }
  }

  static bool has_prefix(const std::set<std::string, std::less<>>& set, std::string_view prefix) {
    auto it = set.lower_bound(prefix);
    return it != set.end() && starts_with(*it, prefix);
  }

  bool fragment_ok(Context ctx, std::string_view fragment) const {
    if (fragment.empty()) return true;
    for (const auto& kw : keywords_of(ctx))
      if (starts_with(kw, fragment)) return true;
    std::string lower = to_lower(fragment);
    if (allows_refs(ctx) && has_prefix(refs, lower)) return true;
    if (allows_tables(ctx) && has_prefix(tables, lower)) return true;
    if (allows_constants(ctx) && (fragment.front() == '\'' || is_number_prefix(fragment, false))) return true;
    if (ctx == Context::Limit && is_number_prefix(fragment, true)) return true;
    return false;
  }

  // Empty when the lexeme fits the context.
  std::optional<std::pair<ErrorKind, std::string>> lexeme_error(Context ctx, const std::string& lex) const {
    const auto& kws = keywords_of(ctx);
    if (std::binary_search(kws.begin(), kws.end(), lex)) return std::nullopt;
    auto bad = [&](ErrorKind kind, std::string why) { return std::make_optional(std::make_pair(kind, std::move(why))); };
    if (is_ref_shape(lex)) {
      if (!allows_refs(ctx)) return bad(ErrorKind::Syntax, fmt::format("column reference '{}' not allowed here", lex));
      if (!refs.count(to_lower(lex))) return bad(ErrorKind::Runtime, fmt::format("no such column '{}'", lex));
      return std::nullopt;
    }
    if (is_sql_word(lex)) return bad(ErrorKind::Syntax, fmt::format("keyword '{}' not allowed here", lex));
    if (is_identifier(lex)) {
      if (!allows_tables(ctx)) return bad(ErrorKind::Syntax, fmt::format("bare name '{}' not allowed here", lex));
      if (!tables.count(to_lower(lex))) return bad(ErrorKind::Runtime, fmt::format("no such table '{}'", lex));
      return std::nullopt;
    }
    if (ctx == Context::Limit && is_number(lex, true)) return std::nullopt;
    if (allows_constants(ctx) && (is_number(lex, false) || is_string_constant(lex))) return std::nullopt;
    return bad(ErrorKind::Syntax, fmt::format("unexpected lexeme '{}'", lex));
  }

  CheckVerdict vocabulary(ClauseKind clause, const std::vector<std::string>& lexemes,
                          const std::optional<std::string>& fragment, bool terminated, std::size_t line) const {
    const Context base = context_of(clause);
    // Open parentheses; true marks a subquery.
    std::vector<bool> parens;
    auto in_subquery = [&] { return std::find(parens.begin(), parens.end(), true) != parens.end(); };
    auto reject = [&](ErrorKind kind, std::size_t at, std::string why) {
      return CheckVerdict::reject(kind, clause, line, at, std::move(why));
    };
    for (std::size_t i = 0; i < lexemes.size(); ++i) {
      const auto& lex = lexemes[i];
      Context ctx = in_subquery() ? Context::Subquery : base;
      if (auto err = lexeme_error(ctx, lex)) return reject(err->first, i, err->second);
      if (ctx == Context::Limit && i > 0) return reject(ErrorKind::Syntax, i, "LIMIT takes one integer");
      if (lex == "(") {
        parens.push_back(false);
      } else if (lex == ")") {
        if (parens.empty()) return reject(ErrorKind::Syntax, i, "unbalanced ')'");
        parens.pop_back();
      } else if (lex == "SELECT") {
        if (i == 0 || lexemes[i - 1] != "(" || parens.empty() || parens.back())
          return reject(ErrorKind::Syntax, i, "SELECT only opens a subquery after '('");
        if (in_subquery()) return reject(ErrorKind::Syntax, i, "subqueries nest at most one level");
        parens.back() = true;
      }
    }
    if (fragment) {
      Context ctx = in_subquery() ? Context::Subquery : base;
      if (ctx == Context::Limit && !lexemes.empty() && !fragment->empty())
        return reject(ErrorKind::Syntax, lexemes.size(), "LIMIT takes one integer");
      if (!fragment_ok(ctx, *fragment))
        return reject(ErrorKind::Syntax, lexemes.size(), fmt::format("'{}' starts no allowed lexeme", *fragment));
    }
    if (terminated && !parens.empty()) return reject(ErrorKind::Syntax, lexemes.size(), "unclosed '('");
    return CheckVerdict::ok();
  }
};

namespace {

// `table (JOIN table)* [ON ref = ref (AND ref = ref)*]`; returns the failing index.
std::optional<std::size_t> from_structure_error(const std::vector<std::string>& lex) {
  std::size_t i = 0;
  std::set<std::string> seen;
  auto table = [&]() -> bool {
    if (i >= lex.size() || !is_identifier(lex[i]) || is_sql_word(lex[i])) return false;
    if (!seen.insert(to_lower(lex[i])).second) return false;
    ++i;
    return true;
  };
  if (!table()) return i;
  while (i < lex.size() && lex[i] == "JOIN") {
    ++i;
    if (!table()) return i;
  }
  if (i < lex.size() && lex[i] == "ON") {
    do {
      ++i;
      if (i >= lex.size() || !is_ref_shape(lex[i])) return i;
      ++i;
      if (i >= lex.size() || lex[i] != "=") return i;
      ++i;
      if (i >= lex.size() || !is_ref_shape(lex[i])) return i;
      ++i;
    } while (i < lex.size() && lex[i] == "AND");
  }
  if (i != lex.size()) return i;
  return std::nullopt;
}

std::vector<std::string> from_tables_of(const ClauseLine& from) {
  std::vector<std::string> out;
  for (const auto& lex : from.lexemes) {
    if (lex == "ON") break;
    if (lex != "JOIN") out.push_back(lex);
  }
  return out;
}

}  // namespace

std::optional<std::vector<ValueExpr>> parse_select_items(const std::vector<std::string>& lex, std::size_t* error_at) {
  std::vector<ValueExpr> items;
  std::size_t i = 0;
  auto fail = [&]() -> std::optional<std::vector<ValueExpr>> {
    if (error_at) *error_at = i;
    return std::nullopt;
  };
  auto ref = [&](ColumnRef& out, bool star_ok) -> bool {
    if (i >= lex.size()) return false;
    if (lex[i] == "*") {
      if (!star_ok) return false;
      out = {"", "*"};
      ++i;
      return true;
    }
    if (!is_ref_shape(lex[i])) return false;
    auto dot = lex[i].find('.');
    out = {lex[i].substr(0, dot), lex[i].substr(dot + 1)};
    ++i;
    return true;
  };
  if (i < lex.size() && lex[i] == "DISTINCT") ++i;
  while (true) {
    ValueExpr item;
    if (i < lex.size() && aggregation_from(lex[i]) && is_sql_word(lex[i])) {
      item.agg = aggregation_from(lex[i]);
      ++i;
      if (i >= lex.size() || lex[i] != "(") return fail();
      ++i;
      if (i < lex.size() && lex[i] == "DISTINCT") {
        item.distinct = true;
        ++i;
      }
      if (!ref(item.ref, *item.agg == Aggregation::Count)) return fail();
      if (i >= lex.size() || lex[i] != ")") return fail();
      ++i;
    } else if (!ref(item.ref, true)) {
      return fail();
    }
    items.push_back(std::move(item));
    if (i == lex.size()) break;
    if (lex[i] != ",") return fail();
    ++i;
  }
  return items;
}

ColumnType output_type(const ValueExpr& item, const DatabaseSchema& schema) {
  auto column_type = [&]() -> ColumnType {
    if (item.ref.is_star()) return ColumnType::Other;
    const Table* t = schema.find_table(item.ref.table);
    const Column* c = t ? t->find_column(item.ref.column) : nullptr;
    return c ? c->type : ColumnType::Other;
  };
  if (!item.agg) return column_type();
  switch (*item.agg) {
    case Aggregation::Count: return ColumnType::Integer;
    case Aggregation::Avg: return ColumnType::Real;
    case Aggregation::Sum: {
      auto t = column_type();
      if (t == ColumnType::Integer || t == ColumnType::Boolean) return ColumnType::Integer;
      if (t == ColumnType::Other) return ColumnType::Other;
      return ColumnType::Real;
    }
    case Aggregation::Min:
    case Aggregation::Max: return column_type();
  }
  return ColumnType::Other;
}

bool types_compatible(ColumnType produced, ColumnType expected) {
  if (produced == ColumnType::Other || expected == ColumnType::Other) return true;
  if (produced == ColumnType::Boolean || expected == ColumnType::Boolean) return true;
  if (is_numeric(produced) && is_numeric(expected)) return true;
  return produced == expected;
}

CheckVerdict check_types(const std::vector<ValueExpr>& select_items, const std::vector<std::string>& from_tables,
                         bool from_complete, const DatabaseSchema& schema, const ExampleTuple& example) {
  std::vector<ColumnType> produced;
  for (const auto& item : select_items) {
    if (!item.agg && item.ref.is_star()) {
      if (!from_complete) return CheckVerdict::ok();
      for (const auto& name : from_tables) {
        const Table* t = schema.find_table(name);
        if (!t) return CheckVerdict::ok();
        for (const auto& c : t->columns) produced.push_back(c.type);
      }
      continue;
    }
    produced.push_back(output_type(item, schema));
  }
  auto reject = [&](std::string why) {
    return CheckVerdict::reject(ErrorKind::Example, ClauseKind::Select, 0, std::numeric_limits<std::size_t>::max(),
                                std::move(why));
  };
  if (produced.size() != example.arity())
    return reject(fmt::format("query yields {} columns, example has {}", produced.size(), example.arity()));
  for (std::size_t i = 0; i < produced.size(); ++i)
    if (!types_compatible(produced[i], example.types[i]))
      return reject(fmt::format("column {} yields {}, example holds {}", i + 1, to_string(produced[i]),
                                to_string(example.types[i])));
  return CheckVerdict::ok();
}

CheckVerdict check_vocabulary(ClauseKind clause, const std::vector<std::string>& lexemes,
                              const std::optional<std::string>& last_incomplete, const DatabaseSchema& schema,
                              std::size_t line) {
  VocabularyIndex index(schema);
  return index.vocabulary(clause, lexemes, last_incomplete, !last_incomplete.has_value(), line);
}

namespace {

bool ends_from_list(const std::string& lex) {
  return lex == "WHERE" || lex == "GROUP" || lex == "HAVING" || lex == "ORDER" || lex == "LIMIT" || lex == ")";
}

/// Index of the ")" closing the "(" at `open`, or lexemes.size() when still open.
std::size_t closing_paren(const std::vector<std::string>& lexemes, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < lexemes.size(); ++i) {
    if (lexemes[i] == "(") ++depth;
    if (lexemes[i] == ")" && --depth == 0) return i;
  }
  return lexemes.size();
}

// Refs in [begin, end) must name a table of `scope`. A subquery adds its own FROM
// tables once its FROM list is complete; before that its refs are not checked.
std::optional<std::size_t> scope_error(const std::vector<std::string>& lexemes, std::size_t begin, std::size_t end,
                                       const std::set<std::string>& scope) {
  for (std::size_t i = begin; i < end; ++i) {
    const auto& lex = lexemes[i];
    if (lex == "(" && i + 1 < end && lexemes[i + 1] == "SELECT") {
      std::size_t close = std::min(closing_paren(lexemes, i), end);
      auto inner = scope;
      bool complete = false, in_from = false;
      int depth = 0;
      for (std::size_t j = i + 2; j < close; ++j) {
        const auto& x = lexemes[j];
        if (x == "(") ++depth;
        if (x == ")") --depth;
        if (depth != 0) continue;
        if (x == "FROM") {
          in_from = true;
        } else if (in_from && ends_from_list(x)) {
          complete = true;
          break;
        } else if (in_from && (lexemes[j - 1] == "FROM" || lexemes[j - 1] == "JOIN")) {
          inner.insert(to_lower(x));
        }
      }
      if (in_from && close < lexemes.size()) complete = true;
      if (complete)
        if (auto at = scope_error(lexemes, i + 2, close, inner)) return at;
      i = close;
    } else if (is_ref_shape(lex) && !scope.count(to_lower(lex.substr(0, lex.find('.'))))) {
      return i;
    }
  }
  return std::nullopt;
}

}  // namespace

CheckVerdict check_scope(const PartialParse& partial) {
  if (!partial.clause_complete(ClauseKind::From)) return CheckVerdict::ok();
  std::set<std::string> in_scope;
  for (const auto& t : from_tables_of(*partial.find(ClauseKind::From))) in_scope.insert(to_lower(t));

  for (std::size_t line = 0; line < partial.lines.size(); ++line) {
    const auto& clause = partial.lines[line];
    if (clause.kind == ClauseKind::Limit) continue;
    if (auto at = scope_error(clause.lexemes, 0, clause.lexemes.size(), in_scope)) {
      const auto& lex = clause.lexemes[*at];
      return CheckVerdict::reject(ErrorKind::Runtime, clause.kind, line, *at,
                                  fmt::format("'{}' is not a table in scope", lex.substr(0, lex.find('.'))));
    }
  }
  return CheckVerdict::ok();
}

namespace {

CheckVerdict run_checks(const PartialParse& partial, const DatabaseSchema& schema,
                        const std::optional<ExampleTuple>& example, const VocabularyIndex& index) {
  CheckVerdict best = CheckVerdict::ok();
  auto consider = [&](CheckVerdict v) {
    if (v.before(best)) best = std::move(v);
  };

  for (std::size_t line = 0; line < partial.lines.size(); ++line) {
    const auto& clause = partial.lines[line];
    std::optional<std::string> fragment;
    if (!clause.terminated) fragment = partial.fragment;
    consider(index.vocabulary(clause.kind, clause.lexemes, fragment, clause.terminated, line));
    if (!clause.terminated) continue;
    if (clause.kind == ClauseKind::Select) {
      std::size_t at = 0;
      if (!parse_select_items(clause.lexemes, &at))
        consider(CheckVerdict::reject(ErrorKind::Syntax, clause.kind, line, at, "malformed SELECT list"));
    } else if (clause.kind == ClauseKind::From) {
      if (auto at = from_structure_error(clause.lexemes))
        consider(CheckVerdict::reject(ErrorKind::Syntax, clause.kind, line, *at, "malformed FROM clause"));
    }
  }
  if (partial.layout_error) {
    const auto& err = *partial.layout_error;
    auto clause = kClauseOrder[std::min(err.line, kClauseOrder.size() - 1)];
    consider(CheckVerdict::reject(ErrorKind::Syntax, clause, err.line, err.lexeme, err.message));
  }

  consider(check_scope(partial));

  if (example && partial.clause_complete(ClauseKind::Select)) {
    const auto& select = *partial.find(ClauseKind::Select);
    if (auto items = parse_select_items(select.lexemes)) {
      std::vector<std::string> tables;
      bool from_complete = partial.clause_complete(ClauseKind::From);
      if (from_complete) tables = from_tables_of(*partial.find(ClauseKind::From));
      auto v = check_types(*items, tables, from_complete, schema, *example);
      if (!v.pass) v.lexeme = select.lexemes.size();
      consider(std::move(v));
    }
  }

  if (partial.eos && best.pass) {
    std::size_t line = partial.lines.empty() ? 0 : partial.lines.size() - 1;
    std::size_t lexeme = partial.lines.empty() ? 0 : partial.lines.back().lexemes.size();
    auto clause = partial.current_clause();
    if (!partial.is_complete) {
      best = CheckVerdict::reject(ErrorKind::Syntax, clause, line, lexeme, "generation ended inside the query");
    }
  }
  return best;
}

CheckVerdict check_text(std::string_view text, bool eos, const DatabaseSchema& schema,
                        const std::optional<ExampleTuple>& example, const VocabularyIndex& index) {
  PartialParse partial;
  try {
    partial = parse_partial(text, eos);
  } catch (const Error& e) {
    auto line = find_order_violation(text).value_or(0);
    return CheckVerdict::reject(ErrorKind::Syntax, kClauseOrder[std::min(line, kClauseOrder.size() - 1)], line, 0,
                                e.detail());
  }
  auto verdict = run_checks(partial, schema, example, index);
  if (verdict.pass && partial.is_complete) {
    try {
      parse_normalized(text);
    } catch (const Error& e) {
      return CheckVerdict::reject(ErrorKind::Syntax, ClauseKind::Limit, kClauseOrder.size() - 1, 0, e.detail());
    }
  }
  return verdict;
}

}  // namespace

CheckVerdict check_partial(const PartialParse& partial, const DatabaseSchema& schema,
                           const std::optional<ExampleTuple>& example) {
  VocabularyIndex index(schema);
  return run_checks(partial, schema, example, index);
}

SymbolicChecker::SymbolicChecker(DatabaseSchema schema, std::optional<ExampleTuple> example)
    : schema_(std::move(schema)), example_(std::move(example)), index_(std::make_shared<VocabularyIndex>(schema_)) {}

CheckVerdict SymbolicChecker::check(std::string_view text, bool eos) const {
  return check_text(text, eos, schema_, example_, *index_);
}

CheckVerdict SymbolicChecker::check(const PartialParse& partial) const {
  return run_checks(partial, schema_, example_, *index_);
}

}  // namespace nsql
