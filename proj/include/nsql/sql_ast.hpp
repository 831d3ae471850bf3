#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nsql {

enum class ClauseKind { Select, From, Where, GroupBy, Having, OrderBy, Limit };

inline constexpr std::array<ClauseKind, 7> kClauseOrder = {ClauseKind::Select,  ClauseKind::From,
                                                           ClauseKind::Where,   ClauseKind::GroupBy,
                                                           ClauseKind::Having,  ClauseKind::OrderBy,
                                                           ClauseKind::Limit};

/// Clause keyword as rendered ("GROUP BY" is two lexemes).
std::string_view keyword(ClauseKind kind);
constexpr std::size_t index_of(ClauseKind kind) { return static_cast<std::size_t>(kind); }

enum class Aggregation { Count, Sum, Avg, Min, Max };

inline constexpr std::array<Aggregation, 5> kAggregations = {Aggregation::Count, Aggregation::Sum, Aggregation::Avg,
                                                             Aggregation::Min, Aggregation::Max};

std::string_view to_string(Aggregation agg);
std::optional<Aggregation> aggregation_from(std::string_view word);

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge, Like, NotLike, In, NotIn, Between };

/// Lexeme spelling; NotLike and NotIn render as two lexemes.
std::string_view to_string(CompareOp op);

/// Copyable owning pointer with value semantics.
template <class T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  bool operator==(const Box& other) const { return *ptr_ == *other.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

/// `table.column`, or the star with an empty table.
struct ColumnRef {
  std::string table;
  std::string column;

  bool is_star() const { return column == "*"; }
  std::string text() const { return is_star() ? "*" : table + "." + column; }
  bool operator==(const ColumnRef&) const = default;
};

struct ValueExpr {
  std::optional<Aggregation> agg;
  bool distinct = false;
  ColumnRef ref;

  bool operator==(const ValueExpr&) const = default;
};

struct Constant {
  enum class Kind { Number, String };
  Kind kind = Kind::Number;
  /// Number spelling as written, or the unescaped string contents.
  std::string text;

  bool operator==(const Constant&) const = default;
};

struct NormalizedQuery;

using Operand = std::variant<Constant, ValueExpr, Box<NormalizedQuery>>;

struct Predicate {
  ValueExpr lhs;
  CompareOp op = CompareOp::Eq;
  Operand rhs;
  /// Upper bound of BETWEEN.
  std::optional<Operand> high;

  bool operator==(const Predicate&) const = default;
};

/// Boolean tree. Children of And/Or never share their parent's kind.
struct Condition {
  enum class Kind { Leaf, And, Or };
  Kind kind = Kind::Leaf;
  std::optional<Predicate> leaf;
  std::vector<Condition> children;

  static Condition make_leaf(Predicate p);
  /// Joins two conditions, flattening same-kind children.
  static Condition combine(Kind kind, Condition a, Condition b);

  bool operator==(const Condition&) const = default;
};

struct JoinCondition {
  ColumnRef left;
  ColumnRef right;

  bool operator==(const JoinCondition&) const = default;
};

struct OrderItem {
  ValueExpr expr;
  bool descending = false;

  bool operator==(const OrderItem&) const = default;
};

struct NormalizedQuery {
  bool distinct = false;
  std::vector<ValueExpr> select;
  std::vector<std::string> from_tables;
  std::vector<JoinCondition> joins;
  std::optional<Condition> where;
  std::vector<ColumnRef> group_by;
  std::optional<Condition> having;
  std::vector<OrderItem> order_by;
  std::optional<std::int64_t> limit;

  bool operator==(const NormalizedQuery&) const = default;
};

}  // namespace nsql
