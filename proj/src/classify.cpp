#include "nsql/classify.hpp"

#include "nsql/error.hpp"
#include "nsql/normalize.hpp"
#include "nsql/render.hpp"
#include "nsql/repair.hpp"

namespace nsql {

std::string_view to_string(QueryLabel label) {
  switch (label) {
    case QueryLabel::Correct: return "Correct";
    case QueryLabel::ExampleError: return "ExampleError";
    case QueryLabel::RuntimeError: return "RuntimeError";
    case QueryLabel::SyntaxError: return "SyntaxError";
  }
  return "";
}

QueryLabel label_of(const CheckVerdict& verdict) {
  if (verdict.pass) return QueryLabel::Correct;
  switch (verdict.kind) {
    case ErrorKind::Syntax: return QueryLabel::SyntaxError;
    case ErrorKind::Runtime: return QueryLabel::RuntimeError;
    case ErrorKind::Example: return QueryLabel::ExampleError;
  }
  return QueryLabel::SyntaxError;
}

QueryLabel predict_label(std::string_view text, const DatabaseSchema& schema, const std::optional<ExampleTuple>& example) {
  return label_of(SymbolicChecker(schema, example).check(text, true));
}

QueryLabel label_by_execution(std::string_view text, const TaskDatabase& db, const ExpectedResult& expected) {
  try {
    parse_normalized(text);
  } catch (const Error&) {
    return QueryLabel::SyntaxError;
  }
  auto result = db.run(executable_sql(text));
  if (const auto* failure = std::get_if<RuntimeFailure>(&result)) {
    const auto& msg = failure->message;
    if (msg.find("syntax error") != std::string::npos || msg.find("incomplete input") != std::string::npos)
      return QueryLabel::SyntaxError;
    return QueryLabel::RuntimeError;
  }
  if (std::holds_alternative<Timeout>(result)) return QueryLabel::RuntimeError;
  const auto& rows = std::get<ResultSet>(result).rows;
  if (expected.gold_rows)
    return same_rows(rows, *expected.gold_rows, expected.ordered) ? QueryLabel::Correct : QueryLabel::ExampleError;
  return satisfies_examples(result, expected.examples) ? QueryLabel::Correct : QueryLabel::ExampleError;
}

}  // namespace nsql
