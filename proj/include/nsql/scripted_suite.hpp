#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nsql/database.hpp"
#include "nsql/harness.hpp"
#include "nsql/scripted_model.hpp"

namespace nsql {

/// Routing key matching exactly one serialized task: its question line.
std::string route_key(const TaskInstance& task);

/// FNV-1a of the task id; seeds the noisy route of that task.
std::uint64_t seed_for(std::string_view task_id);

/// The rendered gold query as the single path, probability 1.
ScriptedRoute clean_route(const TaskInstance& task, const DatabaseSchema& schema);

/// The clean path plus three out-of-vocabulary distractors at seeded steps. Two of
/// them recover onto the scripted suffix, so unchecked search follows them to the end.
ScriptedRoute noisy_route(const TaskInstance& task, const DatabaseSchema& schema, std::uint64_t seed);

/// The first Hamming-1 variant of the gold query that passes the checker but misses
/// the examples, as the single path. Empty when no such variant exists.
std::optional<ScriptedRoute> corrupted_route(const TaskInstance& task, const DatabaseSchema& schema,
                                             const TaskDatabase& db);

enum class SeededError { UnknownColumn, Syntax, WrongConstant, TypeMismatch };

struct SeededQuery {
  SeededError kind;
  std::string text;
};

/// Complete-layout queries derived from the gold query, one per error kind that
/// applies to it: an unknown column, a dangling comma, a changed constant, and a
/// SELECT column whose type contradicts the example.
std::vector<SeededQuery> seeded_errors(const TaskInstance& task, const DatabaseSchema& schema, const TaskDatabase& db);

/// The seeded queries, then gold, with strictly decreasing probabilities.
ScriptedRoute seeded_error_route(const TaskInstance& task, const DatabaseSchema& schema, const TaskDatabase& db);

enum class SuiteKind { Clean, Noisy, Corrupted, SeededErrors };

/// One route per task with a gold query that normalizes; other tasks get no route.
ScriptedModel build_suite(const Dataset& dataset, SuiteKind kind);

}  // namespace nsql
