#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nsql/database.hpp"
#include "nsql/schema.hpp"
#include "nsql/value.hpp"

namespace nsql {

struct TaskInstance {
  std::string id;
  std::string question;
  std::string db_id;
  std::optional<std::string> gold_query;
  std::vector<ExampleTuple> examples;
};

/// Reads a Spider-style task file. Records may carry optional `id` and `examples` fields.
std::vector<TaskInstance> load_tasks(const std::filesystem::path& dataset_file, const SchemaMap& schemas);
std::vector<TaskInstance> parse_tasks(std::string_view json_text, const SchemaMap& schemas);

std::string tasks_to_json(const std::vector<TaskInstance>& tasks);
void save_tasks(const std::filesystem::path& file, const std::vector<TaskInstance>& tasks);

/// Parses one example tuple from a JSON array text such as `[28.0, "France"]`.
ExampleTuple parse_example(std::string_view json_text);
std::string example_to_json(const ExampleTuple& tuple);

/// First row of the gold query's result, typed by storage class.
ExampleTuple derive_example(const TaskDatabase& db, std::string_view gold_query);

inline constexpr std::string_view kSectionDelimiter = "----";

/// Canonical task text fed to the language model. Database contents are never included.
std::string serialize_task(const TaskInstance& task, const DatabaseSchema& schema, bool include_examples = true);

}  // namespace nsql
