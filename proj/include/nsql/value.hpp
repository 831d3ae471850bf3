#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nsql/schema.hpp"

namespace nsql {

struct Null {
  bool operator==(const Null&) const = default;
};

/// A SQLite value by storage class.
using Value = std::variant<Null, std::int64_t, double, std::string>;
using Row = std::vector<Value>;

/// Storage-class type of a value; NULL maps to Other.
ColumnType storage_type(const Value& value);

/// Equality with numeric unification: an integer equals a real with zero fractional
/// part; text compares exactly and case-sensitively; NULL equals NULL.
bool values_equal(const Value& a, const Value& b);
bool rows_equal(const Row& a, const Row& b);

/// Strict weak order consistent with values_equal (NULL < numbers < text).
bool value_less(const Value& a, const Value& b);

/// Literal form: 'text' with doubled quotes, integers as-is, reals in shortest
/// round-trip form with a decimal point, NULL.
std::string to_literal(const Value& value);

/// Shortest round-trip spelling of a real that always contains '.', 'e', "inf" or "nan".
std::string format_real(double value);

struct ExampleTuple {
  std::vector<Value> values;
  std::vector<ColumnType> types;

  std::size_t arity() const { return values.size(); }
  /// Builds a tuple whose declared types are the values' storage types.
  static ExampleTuple from_values(std::vector<Value> values);
  bool operator==(const ExampleTuple&) const = default;
};

/// Checks arity ≥ 1 and that each value's runtime type matches its declared type.
bool is_well_formed(const ExampleTuple& tuple);

/// True iff `row` equals `tuple` position-wise under values_equal.
bool row_matches(const Row& row, const ExampleTuple& tuple);

}  // namespace nsql
