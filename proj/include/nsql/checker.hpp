#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nsql/partial.hpp"
#include "nsql/schema.hpp"
#include "nsql/sql_ast.hpp"
#include "nsql/value.hpp"

namespace nsql {

struct VocabularyIndex;

enum class ErrorKind { Syntax, Runtime, Example };

std::string_view to_string(ErrorKind kind);

struct CheckVerdict {
  bool pass = true;
  ErrorKind kind = ErrorKind::Syntax;
  ClauseKind clause = ClauseKind::Select;
  /// Offending position: clause line and body lexeme index.
  std::size_t line = 0;
  std::size_t lexeme = 0;
  std::string detail;

  static CheckVerdict ok() { return {}; }
  static CheckVerdict reject(ErrorKind kind, ClauseKind clause, std::size_t line, std::size_t lexeme, std::string detail);
  bool before(const CheckVerdict& other) const;
};

/// Validates possibly incomplete Normalized SQL text.
class PartialQueryChecker {
 public:
  virtual ~PartialQueryChecker() = default;
  /// `eos` marks that generation ended after `text`.
  virtual CheckVerdict check(std::string_view text, bool eos) const = 0;
};

/// Vocabulary, scope and type checks using only the schema and an optional example.
class SymbolicChecker : public PartialQueryChecker {
 public:
  SymbolicChecker(DatabaseSchema schema, std::optional<ExampleTuple> example);

  CheckVerdict check(std::string_view text, bool eos) const override;
  CheckVerdict check(const PartialParse& partial) const;

  const DatabaseSchema& schema() const { return schema_; }
  const std::optional<ExampleTuple>& example() const { return example_; }

 private:
  DatabaseSchema schema_;
  std::optional<ExampleTuple> example_;
  std::shared_ptr<const VocabularyIndex> index_;
};

CheckVerdict check_partial(const PartialParse& partial, const DatabaseSchema& schema,
                           const std::optional<ExampleTuple>& example);

/// Vocabulary of one clause line. `last_incomplete` is the trailing fragment, if any.
CheckVerdict check_vocabulary(ClauseKind clause, const std::vector<std::string>& lexemes,
                              const std::optional<std::string>& last_incomplete, const DatabaseSchema& schema,
                              std::size_t line = 0);

/// Column references outside subqueries must name tables of the completed FROM line.
CheckVerdict check_scope(const PartialParse& partial);

/// Output arity and types of the SELECT items against the example.
CheckVerdict check_types(const std::vector<ValueExpr>& select_items, const std::vector<std::string>& from_tables,
                         bool from_complete, const DatabaseSchema& schema, const ExampleTuple& example);

/// Structural parse of SELECT body lexemes; nullopt with `error_at` set on failure.
std::optional<std::vector<ValueExpr>> parse_select_items(const std::vector<std::string>& lexemes,
                                                         std::size_t* error_at = nullptr);

/// Output type of one SELECT item; the star is not expanded here.
ColumnType output_type(const ValueExpr& item, const DatabaseSchema& schema);

bool types_compatible(ColumnType produced, ColumnType expected);

}  // namespace nsql
