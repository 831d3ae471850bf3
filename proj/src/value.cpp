#include "nsql/value.hpp"

#include <cmath>

#include <fmt/format.h>

namespace nsql {

ColumnType storage_type(const Value& value) {
  switch (value.index()) {
    case 1: return ColumnType::Integer;
    case 2: return ColumnType::Real;
    case 3: return ColumnType::Text;
    default: return ColumnType::Other;
  }
}

namespace {

bool as_number(const Value& v, double& out) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) {
    out = static_cast<double>(*i);
    return true;
  }
  if (const auto* d = std::get_if<double>(&v)) {
    out = *d;
    return true;
  }
  return false;
}

int rank(const Value& v) {
  switch (v.index()) {
    case 0: return 0;
    case 1:
    case 2: return 1;
    default: return 2;
  }
}

}  // namespace

bool values_equal(const Value& a, const Value& b) {
  if (a.index() == 1 && b.index() == 1) return std::get<1>(a) == std::get<1>(b);
  double x = 0, y = 0;
  if (as_number(a, x) && as_number(b, y)) return x == y;
  if (a.index() != b.index()) return false;
  return a == b;
}

bool rows_equal(const Row& a, const Row& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!values_equal(a[i], b[i])) return false;
  return true;
}

bool value_less(const Value& a, const Value& b) {
  int ra = rank(a), rb = rank(b);
  if (ra != rb) return ra < rb;
  if (ra == 0) return false;
  if (ra == 1) {
    if (a.index() == 1 && b.index() == 1) return std::get<1>(a) < std::get<1>(b);
    double x = 0, y = 0;
    as_number(a, x);
    as_number(b, y);
    return x < y;
  }
  return std::get<3>(a) < std::get<3>(b);
}

std::string format_real(double value) {
  std::string s = fmt::format("{}", value);
  if (s.find_first_of(".eEna") == std::string::npos) s += ".0";
  return s;
}

std::string to_literal(const Value& value) {
  switch (value.index()) {
    case 0: return "NULL";
    case 1: return std::to_string(std::get<1>(value));
    case 2: return format_real(std::get<2>(value));
    default: {
      std::string out = "'";
      for (char c : std::get<3>(value)) {
        if (c == '\'') out += '\'';
        out += c;
      }
      return out + "'";
    }
  }
}

ExampleTuple ExampleTuple::from_values(std::vector<Value> values) {
  ExampleTuple t;
  for (const auto& v : values) t.types.push_back(storage_type(v));
  t.values = std::move(values);
  return t;
}

bool is_well_formed(const ExampleTuple& tuple) {
  if (tuple.values.empty() || tuple.values.size() != tuple.types.size()) return false;
  for (std::size_t i = 0; i < tuple.values.size(); ++i) {
    ColumnType declared = tuple.types[i];
    ColumnType actual = storage_type(tuple.values[i]);
    if (actual == ColumnType::Other || declared == ColumnType::Other) continue;
    // Booleans are stored as integers.
    if (declared == ColumnType::Boolean && actual == ColumnType::Integer) continue;
    if (declared != actual) return false;
  }
  return true;
}

bool row_matches(const Row& row, const ExampleTuple& tuple) {
  if (row.size() != tuple.values.size()) return false;
  for (std::size_t i = 0; i < row.size(); ++i)
    if (!values_equal(row[i], tuple.values[i])) return false;
  return true;
}

}  // namespace nsql
