#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "nsql/checker.hpp"
#include "nsql/database.hpp"
#include "nsql/render.hpp"
#include "nsql/search.hpp"
#include "nsql/sql_ast.hpp"

namespace nsql {

/// Runs the rendered query read-only.
ExecutionResult execute(const TaskDatabase& db, const NormalizedQuery& query,
                        std::chrono::milliseconds timeout = kDefaultQueryTimeout);

/// True iff the result holds rows and every example tuple occurs among them.
bool satisfies_examples(const ExecutionResult& result, const std::vector<ExampleTuple>& examples);

enum class SubstitutionClass { Aggregation, Connective, Comparison, ColumnRef };

std::string_view to_string(SubstitutionClass cls);

struct HammingVariant {
  std::string text;
  NormalizedQuery query;
  ClauseKind clause;
  /// Lexeme index within the clause body.
  std::size_t position;
  SubstitutionClass cls;
  std::string replaced;
  std::string replacement;
};

/// Lazily yields every query one same-class lexeme substitution away, by position
/// ascending and then class-member order. Constants are never substituted.
class HammingOneQueries {
 public:
  HammingOneQueries(const NormalizedQuery& query, const DatabaseSchema& schema);

  std::optional<HammingVariant> next();

 private:
  struct Site {
    ClauseKind clause;
    std::size_t position;
    SubstitutionClass cls;
  };

  const std::vector<std::string>& members(SubstitutionClass cls) const;

  ClauseLexemes lexemes_;
  std::vector<Site> sites_;
  std::vector<std::string> columns_;
  std::size_t site_ = 0;
  std::size_t member_ = 0;
};

std::vector<HammingVariant> hamming_one_queries(const NormalizedQuery& query, const DatabaseSchema& schema);

struct RepairOptions {
  bool repair_enabled = true;
  /// Skip variants the static checker rejects.
  bool prefilter = true;
  std::chrono::milliseconds per_query_timeout = kDefaultQueryTimeout;
  std::optional<Clock::time_point> deadline;
  /// Parallel variant executions, each on its own database handle.
  std::size_t workers = 1;
};

struct RepairOutcome {
  bool success = false;
  std::optional<NormalizedQuery> query;
  std::string text;
  bool repaired = false;
  std::size_t variants_generated = 0;
  std::size_t variants_prefiltered = 0;
  std::size_t variants_executed = 0;
};

/// Accepts the query if its result contains the examples, otherwise returns the
/// first Hamming-1 variant (in generation order) whose result does.
RepairOutcome test_and_repair(const NormalizedQuery& query, const TaskDatabase& db, const DatabaseSchema& schema,
                              const std::vector<ExampleTuple>& examples, const PartialQueryChecker* checker,
                              const RepairOptions& options = {});

/// CompleteQueryTester backed by test_and_repair.
class DatabaseTester : public CompleteQueryTester {
 public:
  DatabaseTester(const TaskDatabase& db, const DatabaseSchema& schema, std::vector<ExampleTuple> examples,
                 const PartialQueryChecker* checker, RepairOptions options);

  TestResult test(const std::string& text, Clock::time_point deadline) override;

 private:
  const TaskDatabase& db_;
  const DatabaseSchema& schema_;
  std::vector<ExampleTuple> examples_;
  const PartialQueryChecker* checker_;
  RepairOptions options_;
};

}  // namespace nsql
