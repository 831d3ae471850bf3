#include "nsql/render.hpp"

namespace nsql {

namespace {

using Out = std::vector<Lexeme>;

void emit(Out& out, std::string text, LexemeClass cls) { out.push_back({std::move(text), cls}); }

void emit_ref(Out& out, const ColumnRef& ref) {
  if (ref.is_star())
    emit(out, "*", LexemeClass::Star);
  else
    emit(out, ref.text(), LexemeClass::Column);
}

void emit_value(Out& out, const ValueExpr& e) {
  if (!e.agg) {
    emit_ref(out, e.ref);
    return;
  }
  emit(out, std::string(to_string(*e.agg)), LexemeClass::Aggregation);
  emit(out, "(", LexemeClass::Punctuation);
  if (e.distinct) emit(out, "DISTINCT", LexemeClass::Keyword);
  emit_ref(out, e.ref);
  emit(out, ")", LexemeClass::Punctuation);
}

void emit_block(Out& out, const NormalizedQuery& q);

void emit_operand(Out& out, const Operand& op) {
  if (const auto* c = std::get_if<Constant>(&op)) {
    emit(out, c->kind == Constant::Kind::String ? quote_string(c->text) : c->text, LexemeClass::Constant);
  } else if (const auto* v = std::get_if<ValueExpr>(&op)) {
    emit_value(out, *v);
  } else {
    emit(out, "(", LexemeClass::Punctuation);
    emit_block(out, *std::get<Box<NormalizedQuery>>(op));
    emit(out, ")", LexemeClass::Punctuation);
  }
}

void emit_predicate(Out& out, const Predicate& p) {
  emit_value(out, p.lhs);
  switch (p.op) {
    case CompareOp::NotLike:
      emit(out, "NOT", LexemeClass::Operator);
      emit(out, "LIKE", LexemeClass::Operator);
      break;
    case CompareOp::NotIn:
      emit(out, "NOT", LexemeClass::Operator);
      emit(out, "IN", LexemeClass::Operator);
      break;
    case CompareOp::Like:
    case CompareOp::In:
    case CompareOp::Between: emit(out, std::string(to_string(p.op)), LexemeClass::Operator); break;
    default: emit(out, std::string(to_string(p.op)), LexemeClass::Comparison); break;
  }
  emit_operand(out, p.rhs);
  if (p.high) {
    emit(out, "AND", LexemeClass::Keyword);
    emit_operand(out, *p.high);
  }
}

void emit_condition(Out& out, const Condition& c) {
  if (c.kind == Condition::Kind::Leaf) {
    emit_predicate(out, *c.leaf);
    return;
  }
  const char* connective = c.kind == Condition::Kind::And ? "AND" : "OR";
  for (std::size_t i = 0; i < c.children.size(); ++i) {
    if (i) emit(out, connective, LexemeClass::Connective);
    const auto& child = c.children[i];
    bool wrap = c.kind == Condition::Kind::And && child.kind == Condition::Kind::Or;
    if (wrap) emit(out, "(", LexemeClass::Punctuation);
    emit_condition(out, child);
    if (wrap) emit(out, ")", LexemeClass::Punctuation);
  }
}

void emit_comma(Out& out, std::size_t i) {
  if (i) emit(out, ",", LexemeClass::Punctuation);
}

void emit_keyword(Out& out, ClauseKind kind) {
  std::string_view kw = keyword(kind);
  auto space = kw.find(' ');
  if (space == std::string_view::npos) {
    emit(out, std::string(kw), LexemeClass::ClauseKeyword);
  } else {
    emit(out, std::string(kw.substr(0, space)), LexemeClass::ClauseKeyword);
    emit(out, std::string(kw.substr(space + 1)), LexemeClass::ClauseKeyword);
  }
}

// Subqueries render inline with only their non-empty clauses.
void emit_block(Out& out, const NormalizedQuery& q) {
  auto clauses = render_clauses(q);
  for (auto kind : kClauseOrder) {
    const auto& body = clauses[index_of(kind)];
    if (body.empty()) continue;
    emit_keyword(out, kind);
    out.insert(out.end(), body.begin(), body.end());
  }
}

}  // namespace

std::string quote_string(std::string_view text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

ClauseLexemes render_clauses(const NormalizedQuery& q) {
  ClauseLexemes lines;

  auto& select = lines[index_of(ClauseKind::Select)];
  if (q.distinct) emit(select, "DISTINCT", LexemeClass::Keyword);
  for (std::size_t i = 0; i < q.select.size(); ++i) {
    emit_comma(select, i);
    emit_value(select, q.select[i]);
  }

  auto& from = lines[index_of(ClauseKind::From)];
  for (std::size_t i = 0; i < q.from_tables.size(); ++i) {
    if (i) emit(from, "JOIN", LexemeClass::Keyword);
    emit(from, q.from_tables[i], LexemeClass::Table);
  }
  for (std::size_t i = 0; i < q.joins.size(); ++i) {
    emit(from, i ? "AND" : "ON", LexemeClass::Keyword);
    emit_ref(from, q.joins[i].left);
    emit(from, "=", LexemeClass::Operator);
    emit_ref(from, q.joins[i].right);
  }

  if (q.where) emit_condition(lines[index_of(ClauseKind::Where)], *q.where);

  auto& group = lines[index_of(ClauseKind::GroupBy)];
  for (std::size_t i = 0; i < q.group_by.size(); ++i) {
    emit_comma(group, i);
    emit_ref(group, q.group_by[i]);
  }

  if (q.having) emit_condition(lines[index_of(ClauseKind::Having)], *q.having);

  auto& order = lines[index_of(ClauseKind::OrderBy)];
  for (std::size_t i = 0; i < q.order_by.size(); ++i) {
    emit_comma(order, i);
    emit_value(order, q.order_by[i].expr);
    emit(order, q.order_by[i].descending ? "DESC" : "ASC", LexemeClass::Keyword);
  }

  if (q.limit) emit(lines[index_of(ClauseKind::Limit)], std::to_string(*q.limit), LexemeClass::Constant);
  return lines;
}

std::string render_line(ClauseKind kind, const std::vector<Lexeme>& body) {
  std::string line(keyword(kind));
  for (const auto& lex : body) {
    line += ' ';
    line += lex.text;
  }
  return line;
}

std::string render(const NormalizedQuery& q) {
  auto clauses = render_clauses(q);
  std::string out;
  for (auto kind : kClauseOrder) {
    out += render_line(kind, clauses[index_of(kind)]);
    out += '\n';
  }
  return out;
}

std::string executable_sql(std::string_view normalized_text) {
  std::string out;
  std::size_t start = 0;
  while (start < normalized_text.size()) {
    auto end = normalized_text.find('\n', start);
    if (end == std::string_view::npos) end = normalized_text.size();
    auto line = normalized_text.substr(start, end - start);
    bool bare = false;
    for (auto kind : kClauseOrder)
      if (line == keyword(kind)) bare = true;
    if (!bare && !line.empty()) {
      out += line;
      out += '\n';
    }
    start = end + 1;
  }
  return out;
}

}  // namespace nsql
