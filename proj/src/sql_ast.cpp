#include "nsql/sql_ast.hpp"

#include "nsql/schema.hpp"

namespace nsql {

std::string_view keyword(ClauseKind kind) {
  switch (kind) {
    case ClauseKind::Select: return "SELECT";
    case ClauseKind::From: return "FROM";
    case ClauseKind::Where: return "WHERE";
    case ClauseKind::GroupBy: return "GROUP BY";
    case ClauseKind::Having: return "HAVING";
    case ClauseKind::OrderBy: return "ORDER BY";
    case ClauseKind::Limit: return "LIMIT";
  }
  return "";
}

std::string_view to_string(Aggregation agg) {
  switch (agg) {
    case Aggregation::Count: return "COUNT";
    case Aggregation::Sum: return "SUM";
    case Aggregation::Avg: return "AVG";
    case Aggregation::Min: return "MIN";
    case Aggregation::Max: return "MAX";
  }
  return "";
}

std::optional<Aggregation> aggregation_from(std::string_view word) {
  for (auto agg : kAggregations)
    if (iequals(word, to_string(agg))) return agg;
  return std::nullopt;
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
    case CompareOp::Like: return "LIKE";
    case CompareOp::NotLike: return "NOT LIKE";
    case CompareOp::In: return "IN";
    case CompareOp::NotIn: return "NOT IN";
    case CompareOp::Between: return "BETWEEN";
  }
  return "";
}

Condition Condition::make_leaf(Predicate p) {
  Condition c;
  c.leaf = std::move(p);
  return c;
}

Condition Condition::combine(Kind kind, Condition a, Condition b) {
  Condition out;
  out.kind = kind;
  for (auto* part : {&a, &b}) {
    if (part->kind == kind) {
      for (auto& child : part->children) out.children.push_back(std::move(child));
    } else {
      out.children.push_back(std::move(*part));
    }
  }
  return out;
}

}  // namespace nsql
