#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nsql/database.hpp"
#include "nsql/harness.hpp"
#include "nsql/schema.hpp"
#include "nsql/scripted_model.hpp"
#include "nsql/task.hpp"

namespace fixtures {

/// Source directory of tables.json, dev.json and sql/.
std::filesystem::path source_dir();

/// Fixture databases built once per process from sql/*.sql.
struct Corpus {
  std::filesystem::path db_root;
  /// Every record, including the ones normalization rejects.
  nsql::Dataset raw;
  /// Records whose gold query normalizes, gold replaced by Normalized SQL.
  nsql::Dataset normalized;

  const nsql::DatabaseSchema& schema(const std::string& db_id) const;
  nsql::TaskDatabase db(const std::string& db_id) const;
  const nsql::TaskInstance& task(const std::string& id) const;
};

const Corpus& corpus();

/// A scratch directory removed with the process.
std::filesystem::path scratch_dir();

/// Creates <scratch>/<name>/<name>.sqlite from a script and returns the root.
std::filesystem::path make_db(const std::string& name, const std::string& script);

/// Dataset over `corpus().normalized` keeping only tasks with the given ids (all when empty).
nsql::Dataset subset(const std::vector<std::string>& ids);

}  // namespace fixtures
