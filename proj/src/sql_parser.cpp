#include "nsql/sql_parser.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

#include "nsql/error.hpp"
#include "nsql/sql_lexer.hpp"

namespace nsql {

namespace {

constexpr std::string_view kReserved[] = {
    "SELECT", "FROM",   "WHERE",  "GROUP", "BY",    "HAVING", "ORDER",   "LIMIT", "JOIN",   "ON",
    "AS",     "AND",    "OR",     "NOT",   "IN",    "LIKE",   "BETWEEN", "DISTINCT", "ASC", "DESC",
    "UNION",  "INTERSECT", "EXCEPT", "INNER", "LEFT", "RIGHT", "OUTER",  "CROSS", "USING",  "IS",
    "NULL",   "EXISTS", "CASE",   "WHEN",  "THEN",  "ELSE",   "END",     "NATURAL", "OFFSET", "FULL"};

bool reserved(const SqlToken& tok) {
  if (tok.kind != TokenKind::Identifier) return false;
  return std::any_of(std::begin(kReserved), std::end(kReserved), [&](auto w) { return iequals(tok.text, w); });
}

bool name_token(const SqlToken& tok) {
  return tok.kind == TokenKind::QuotedIdentifier || (tok.kind == TokenKind::Identifier && !reserved(tok));
}

struct Scope {
  struct Entry {
    std::string table;
    std::string alias;
  };
  std::vector<Entry> tables;
  const Scope* outer = nullptr;
  std::vector<std::pair<std::string, ValueExpr>> select_aliases;
};

class Parser {
 public:
  Parser(std::vector<SqlToken> tokens, const DatabaseSchema* schema) : toks_(std::move(tokens)), schema_(schema) {}

  NormalizedQuery parse_statement() {
    for (const auto& tok : toks_)
      if (tok.is_word("UNION") || tok.is_word("INTERSECT") || tok.is_word("EXCEPT"))
        throw Error(Errc::SetOperationUnsupported, fmt::format("'{}' at offset {}", tok.text, tok.offset));
    auto q = parse_block(nullptr, 0);
    while (peek().is_symbol(";")) ++pos_;
    if (peek().kind != TokenKind::End) fail("unexpected trailing input");
    return q;
  }

 private:
  const SqlToken& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const SqlToken& next() {
    const auto& tok = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return tok;
  }

  [[noreturn]] void fail(std::string_view what) const {
    const auto& tok = peek();
    throw Error(Errc::ParseError, fmt::format("{} near '{}' at offset {}", what, tok.text, tok.offset));
  }

  void expect_word(std::string_view word) {
    if (!peek().is_word(word)) fail(fmt::format("expected {}", word));
    ++pos_;
  }
  void expect_symbol(std::string_view sym) {
    if (!peek().is_symbol(sym)) fail(fmt::format("expected '{}'", sym));
    ++pos_;
  }

  bool at_clause_end() const {
    const auto& tok = peek();
    return tok.kind == TokenKind::End || tok.is_symbol(")") || tok.is_symbol(";") || tok.is_word("FROM") ||
           tok.is_word("WHERE") || tok.is_word("GROUP") || tok.is_word("HAVING") || tok.is_word("ORDER") ||
           tok.is_word("LIMIT");
  }

  // Index of this block's FROM, scanning at paren depth zero.
  std::size_t find_from() const {
    int depth = 0;
    for (std::size_t i = pos_; i < toks_.size(); ++i) {
      const auto& tok = toks_[i];
      if (tok.kind == TokenKind::End) break;
      if (tok.is_symbol("(")) ++depth;
      if (tok.is_symbol(")")) {
        if (depth == 0) break;
        --depth;
      }
      if (depth == 0 && tok.is_word("FROM")) return i;
    }
    fail("missing FROM clause");
  }

  std::string resolve_table(const SqlToken& tok) const {
    if (!schema_) return tok.text;
    const Table* table = schema_->find_table(tok.text);
    if (!table) throw Error(Errc::UnknownName, fmt::format("table '{}'", tok.text));
    return table->name;
  }

  bool at_join() const {
    return peek().is_word("JOIN") || peek().is_symbol(",") || (peek().is_word("INNER") && peek(1).is_word("JOIN")) ||
           (peek().is_word("CROSS") && peek(1).is_word("JOIN"));
  }

  void skip_join_keyword() {
    if (peek().is_word("INNER") || peek().is_word("CROSS")) ++pos_;
    ++pos_;
  }

  // Reads `table [AS alias]` and records it in the scope.
  void read_table(Scope& scope) {
    if (peek().is_symbol("(")) fail("subquery in FROM is not supported");
    if (peek().is_word("LEFT") || peek().is_word("RIGHT") || peek().is_word("OUTER") || peek().is_word("NATURAL") ||
        peek().is_word("FULL"))
      fail("only inner joins are supported");
    if (!name_token(peek())) fail("expected table name");
    std::string table = resolve_table(next());
    std::string alias;
    if (peek().is_word("AS")) {
      ++pos_;
      if (!name_token(peek())) fail("expected alias");
      alias = next().text;
    } else if (name_token(peek())) {
      alias = next().text;
    }
    if (!alias.empty() && !schema_) fail("alias in normalized text");
    for (const auto& e : scope.tables)
      if (iequals(e.table, table))
        throw Error(Errc::SelfJoinUnsupported, fmt::format("table '{}' appears twice in FROM", table));
    scope.tables.push_back({std::move(table), std::move(alias)});
  }

  void collect_tables(std::size_t from_pos, Scope& scope) {
    std::size_t saved = pos_;
    pos_ = from_pos + 1;
    read_table(scope);
    while (true) {
      if (at_join()) {
        skip_join_keyword();
        read_table(scope);
        continue;
      }
      if (peek().is_word("ON")) {
        int depth = 0;
        while (peek().kind != TokenKind::End) {
          if (peek().is_symbol("(")) ++depth;
          if (peek().is_symbol(")")) {
            if (depth == 0) break;
            --depth;
          }
          if (depth == 0 && (at_join() || at_clause_end())) break;
          ++pos_;
        }
        continue;
      }
      if (peek().is_word("USING")) fail("USING is not supported");
      break;
    }
    pos_ = saved;
  }

  ColumnRef resolve_qualified(const Scope& scope, const SqlToken& qualifier, const SqlToken& column) const {
    if (!schema_) return {qualifier.text, column.text};
    for (const Scope* s = &scope; s; s = s->outer) {
      const Scope::Entry* hit = nullptr;
      for (const auto& e : s->tables)
        if (!e.alias.empty() && iequals(e.alias, qualifier.text)) hit = &e;
      if (!hit)
        for (const auto& e : s->tables)
          if (iequals(e.table, qualifier.text)) hit = &e;
      if (!hit) continue;
      const Column* col = schema_->find_table(hit->table)->find_column(column.text);
      if (!col) throw Error(Errc::UnknownName, fmt::format("column '{}.{}'", qualifier.text, column.text));
      return {hit->table, col->name};
    }
    throw Error(Errc::UnknownName, fmt::format("table or alias '{}'", qualifier.text));
  }

  ColumnRef resolve_unqualified(const Scope& scope, const SqlToken& column) const {
    if (!schema_) throw Error(Errc::ParseError, fmt::format("unqualified column '{}' in normalized text", column.text));
    for (const Scope* s = &scope; s; s = s->outer) {
      std::vector<ColumnRef> owners;
      for (const auto& e : s->tables)
        if (const Column* col = schema_->find_table(e.table)->find_column(column.text))
          owners.push_back({e.table, col->name});
      if (owners.size() == 1) return owners.front();
      if (owners.size() > 1) throw Error(Errc::AmbiguousColumn, fmt::format("column '{}'", column.text));
    }
    throw Error(Errc::UnknownName, fmt::format("column '{}'", column.text));
  }

  const ValueExpr* find_select_alias(const Scope& scope, std::string_view name) const {
    for (const auto& [alias, expr] : scope.select_aliases)
      if (iequals(alias, name)) return &expr;
    return nullptr;
  }

  ColumnRef column_ref(const Scope& scope) {
    if (!name_token(peek())) fail("expected column reference");
    const SqlToken& first = next();
    if (peek().is_symbol(".")) {
      ++pos_;
      if (peek().is_symbol("*")) fail("qualified star is not supported");
      if (!name_token(peek()) && peek().kind != TokenKind::Identifier) fail("expected column name");
      return resolve_qualified(scope, first, next());
    }
    if (peek().is_symbol("(")) fail(fmt::format("function '{}' is not supported", first.text));
    return resolve_unqualified(scope, first);
  }

  ValueExpr value_expr(const Scope& scope, bool allow_alias, bool allow_star) {
    ValueExpr expr;
    if (peek().kind == TokenKind::Identifier && peek(1).is_symbol("(")) {
      auto agg = aggregation_from(peek().text);
      if (!agg) fail(fmt::format("function '{}' is not supported", peek().text));
      pos_ += 2;
      expr.agg = agg;
      if (peek().is_word("DISTINCT")) {
        ++pos_;
        expr.distinct = true;
      }
      if (peek().is_symbol("*")) {
        ++pos_;
        if (schema_ && *agg != Aggregation::Count) fail("only COUNT accepts '*'");
        expr.ref = {"", "*"};
      } else {
        expr.ref = column_ref(scope);
      }
      expect_symbol(")");
    } else if (peek().is_symbol("*")) {
      if (!allow_star) fail("unexpected '*'");
      ++pos_;
      expr.ref = {"", "*"};
    } else {
      if (allow_alias && name_token(peek()) && !peek(1).is_symbol(".")) {
        if (const ValueExpr* aliased = find_select_alias(scope, peek().text)) {
          ++pos_;
          return *aliased;
        }
      }
      expr.ref = column_ref(scope);
    }
    if (peek().is_symbol("+") || peek().is_symbol("-") || peek().is_symbol("/") || peek().is_symbol("%"))
      fail("arithmetic is not supported");
    return expr;
  }

  Operand operand(const Scope& scope, bool allow_alias) {
    const auto& tok = peek();
    if (tok.kind == TokenKind::Number) return Constant{Constant::Kind::Number, next().text};
    if (tok.is_symbol("-") && peek(1).kind == TokenKind::Number) {
      ++pos_;
      return Constant{Constant::Kind::Number, "-" + next().text};
    }
    if (tok.kind == TokenKind::String) return Constant{Constant::Kind::String, next().text};
    if (tok.is_symbol("(")) fail("scalar subqueries and value lists are not supported");
    if (tok.is_word("NULL")) fail("NULL literals are not supported");
    return value_expr(scope, allow_alias, false);
  }

  Condition predicate(const Scope& scope, int depth, bool allow_alias) {
    Predicate p;
    p.lhs = value_expr(scope, allow_alias, false);
    const auto& tok = peek();
    if (tok.is_symbol("=") || tok.is_symbol("==")) p.op = CompareOp::Eq;
    else if (tok.is_symbol("!=") || tok.is_symbol("<>")) p.op = CompareOp::Ne;
    else if (tok.is_symbol("<")) p.op = CompareOp::Lt;
    else if (tok.is_symbol("<=")) p.op = CompareOp::Le;
    else if (tok.is_symbol(">")) p.op = CompareOp::Gt;
    else if (tok.is_symbol(">=")) p.op = CompareOp::Ge;
    else if (tok.is_word("LIKE")) p.op = CompareOp::Like;
    else if (tok.is_word("IN")) p.op = CompareOp::In;
    else if (tok.is_word("BETWEEN")) p.op = CompareOp::Between;
    else if (tok.is_word("NOT") && peek(1).is_word("LIKE")) p.op = CompareOp::NotLike;
    else if (tok.is_word("NOT") && peek(1).is_word("IN")) p.op = CompareOp::NotIn;
    else fail("expected comparison operator");
    pos_ += (p.op == CompareOp::NotLike || p.op == CompareOp::NotIn) ? 2 : 1;

    if (p.op == CompareOp::In || p.op == CompareOp::NotIn) {
      expect_symbol("(");
      if (!peek().is_word("SELECT")) fail("IN value lists are not supported");
      if (depth >= 1) fail("subqueries nest at most one level");
      p.rhs = Box<NormalizedQuery>(parse_block(&scope, depth + 1));
      expect_symbol(")");
    } else {
      p.rhs = operand(scope, allow_alias);
      if (p.op == CompareOp::Between) {
        expect_word("AND");
        p.high = operand(scope, allow_alias);
      }
    }
    return Condition::make_leaf(std::move(p));
  }

  Condition unary(const Scope& scope, int depth, bool allow_alias) {
    if (peek().is_symbol("(") && !peek(1).is_word("SELECT")) {
      ++pos_;
      auto c = condition(scope, depth, allow_alias);
      expect_symbol(")");
      return c;
    }
    if (peek().is_word("NOT")) fail("prefix NOT is not supported");
    if (peek().is_word("EXISTS")) fail("EXISTS is not supported");
    return predicate(scope, depth, allow_alias);
  }

  Condition conjunction(const Scope& scope, int depth, bool allow_alias) {
    auto c = unary(scope, depth, allow_alias);
    while (peek().is_word("AND")) {
      ++pos_;
      c = Condition::combine(Condition::Kind::And, std::move(c), unary(scope, depth, allow_alias));
    }
    return c;
  }

  Condition condition(const Scope& scope, int depth, bool allow_alias) {
    auto c = conjunction(scope, depth, allow_alias);
    while (peek().is_word("OR")) {
      ++pos_;
      c = Condition::combine(Condition::Kind::Or, std::move(c), conjunction(scope, depth, allow_alias));
    }
    return c;
  }

  void parse_from(NormalizedQuery& q, const Scope& scope) {
    expect_word("FROM");
    auto skip_table = [&] {
      ++pos_;
      if (peek().is_word("AS")) pos_ += 2;
      else if (name_token(peek())) ++pos_;
    };
    skip_table();
    for (const auto& e : scope.tables) q.from_tables.push_back(e.table);
    while (true) {
      if (at_join()) {
        skip_join_keyword();
        skip_table();
        continue;
      }
      if (peek().is_word("ON")) {
        ++pos_;
        while (true) {
          bool paren = peek().is_symbol("(");
          if (paren) ++pos_;
          JoinCondition jc;
          jc.left = column_ref(scope);
          if (!peek().is_symbol("=") && !peek().is_symbol("==")) fail("join conditions must be equalities");
          ++pos_;
          jc.right = column_ref(scope);
          if (paren) expect_symbol(")");
          q.joins.push_back(std::move(jc));
          if (!peek().is_word("AND")) break;
          ++pos_;
        }
        continue;
      }
      break;
    }
  }

  NormalizedQuery parse_block(const Scope* outer, int depth) {
    NormalizedQuery q;
    expect_word("SELECT");
    Scope scope;
    scope.outer = outer;
    collect_tables(find_from(), scope);

    if (peek().is_word("DISTINCT")) {
      ++pos_;
      q.distinct = true;
    }
    while (true) {
      q.select.push_back(value_expr(scope, false, true));
      if (peek().is_word("AS")) {
        ++pos_;
        if (!name_token(peek()) && peek().kind != TokenKind::String) fail("expected alias");
        if (!schema_) fail("alias in normalized text");
        scope.select_aliases.emplace_back(next().text, q.select.back());
      } else if (name_token(peek())) {
        if (!schema_) fail("alias in normalized text");
        scope.select_aliases.emplace_back(next().text, q.select.back());
      }
      if (!peek().is_symbol(",")) break;
      ++pos_;
    }
    if (!peek().is_word("FROM")) fail("unexpected token in SELECT");
    parse_from(q, scope);

    if (peek().is_word("WHERE")) {
      ++pos_;
      if (!at_clause_end()) q.where = condition(scope, depth, false);
    }
    if (peek().is_word("GROUP")) {
      ++pos_;
      expect_word("BY");
      while (!at_clause_end()) {
        q.group_by.push_back(column_ref(scope));
        if (!peek().is_symbol(",")) break;
        ++pos_;
      }
    }
    if (peek().is_word("HAVING")) {
      ++pos_;
      if (!at_clause_end()) q.having = condition(scope, depth, true);
    }
    if (peek().is_word("ORDER")) {
      ++pos_;
      expect_word("BY");
      while (!at_clause_end()) {
        OrderItem item{value_expr(scope, true, false), false};
        if (peek().is_word("DESC")) {
          ++pos_;
          item.descending = true;
        } else if (peek().is_word("ASC")) {
          ++pos_;
        }
        q.order_by.push_back(std::move(item));
        if (!peek().is_symbol(",")) break;
        ++pos_;
      }
    }
    if (peek().is_word("LIMIT")) {
      ++pos_;
      if (!at_clause_end()) {
        if (peek().kind != TokenKind::Number) fail("LIMIT expects an integer");
        const auto& text = next().text;
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size() || value < 0) fail("LIMIT expects an integer");
        q.limit = value;
        if (peek().is_word("OFFSET") || peek().is_symbol(",")) fail("OFFSET is not supported");
      }
    }
    if (!at_clause_end() || peek().is_word("FROM")) fail("unexpected token");
    if (peek().kind != TokenKind::End && !peek().is_symbol(")") && !peek().is_symbol(";"))
      fail("clause out of order");
    return q;
  }

  std::vector<SqlToken> toks_;
  const DatabaseSchema* schema_;
  std::size_t pos_ = 0;
};

}  // namespace

NormalizedQuery parse_select_statement(std::string_view sql, const DatabaseSchema* schema) {
  Parser parser(lex_sql(sql), schema);
  return parser.parse_statement();
}

}  // namespace nsql
