#include "nsql/exact_match.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "nsql/schema.hpp"

namespace nsql {

namespace {

std::string ref_key(const ColumnRef& ref) { return ref.is_star() ? "*" : to_lower(ref.text()); }

std::string value_key(const ValueExpr& e) {
  std::string inner = (e.distinct ? "distinct " : "") + ref_key(e.ref);
  return e.agg ? fmt::format("{}({})", to_string(*e.agg), inner) : inner;
}

std::string sorted_join(std::vector<std::string> parts, std::string_view sep) {
  std::sort(parts.begin(), parts.end());
  return fmt::format("{}", fmt::join(parts, sep));
}

std::string operand_key(const Operand& op) {
  if (std::holds_alternative<Constant>(op)) return "?";
  if (const auto* v = std::get_if<ValueExpr>(&op)) return value_key(*v);
  return "(" + structure_key(*std::get<Box<NormalizedQuery>>(op)) + ")";
}

std::string condition_key(const Condition& c) {
  if (c.kind == Condition::Kind::Leaf) {
    const auto& p = *c.leaf;
    std::string key = fmt::format("{} {} {}", value_key(p.lhs), to_string(p.op), operand_key(p.rhs));
    if (p.high) key += " " + operand_key(*p.high);
    return key;
  }
  std::vector<std::string> parts;
  for (const auto& child : c.children) parts.push_back("[" + condition_key(child) + "]");
  return (c.kind == Condition::Kind::And ? "and{" : "or{") + sorted_join(std::move(parts), ";") + "}";
}

}  // namespace

std::string structure_key(const NormalizedQuery& q) {
  std::vector<std::string> select, tables, joins, group;
  for (const auto& item : q.select) select.push_back(value_key(item));
  for (const auto& t : q.from_tables) tables.push_back(to_lower(t));
  for (const auto& j : q.joins) {
    auto a = ref_key(j.left), b = ref_key(j.right);
    joins.push_back(a < b ? a + "=" + b : b + "=" + a);
  }
  for (const auto& g : q.group_by) group.push_back(ref_key(g));
  std::string order;
  for (const auto& o : q.order_by) order += value_key(o.expr) + (o.descending ? " desc;" : " asc;");
  return fmt::format("select{}[{}] from[{}] on[{}] where[{}] group[{}] having[{}] order[{}] limit[{}]",
                     q.distinct ? " distinct" : "", sorted_join(select, ","), sorted_join(tables, ","),
                     sorted_join(joins, ","), q.where ? condition_key(*q.where) : "", sorted_join(group, ","),
                     q.having ? condition_key(*q.having) : "", order, q.limit ? "?" : "");
}

bool exact_match(const NormalizedQuery& a, const NormalizedQuery& b) { return structure_key(a) == structure_key(b); }

}  // namespace nsql
