#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "nsql/checker.hpp"
#include "nsql/database.hpp"

namespace nsql {

enum class QueryLabel { Correct, ExampleError, RuntimeError, SyntaxError };

inline constexpr std::size_t kLabelCount = 4;

std::string_view to_string(QueryLabel label);

/// Static prediction from the symbolic checker: Pass maps to Correct.
QueryLabel predict_label(std::string_view text, const DatabaseSchema& schema, const std::optional<ExampleTuple>& example);
QueryLabel label_of(const CheckVerdict& verdict);

struct ExpectedResult {
  /// Gold rows; when present the label compares result multisets.
  std::optional<std::vector<Row>> gold_rows;
  bool ordered = false;
  /// Used when no gold rows are given: every tuple must be contained.
  std::vector<ExampleTuple> examples;
};

/// Ground-truth label obtained by executing the query.
QueryLabel label_by_execution(std::string_view text, const TaskDatabase& db, const ExpectedResult& expected);

}  // namespace nsql
