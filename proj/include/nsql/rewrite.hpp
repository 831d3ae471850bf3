#pragma once

#include <string>
#include <vector>

#include "nsql/schema.hpp"
#include "nsql/task.hpp"

namespace nsql {

struct RejectedTask {
  std::string id;
  std::string reason;
};

struct RewriteResult {
  /// Tasks whose gold query is replaced by rendered Normalized SQL.
  std::vector<TaskInstance> normalized;
  std::vector<RejectedTask> rejected;
};

/// Normalizes every gold query. Tasks that cannot be normalized, or carry no gold
/// query, are rejected with the reason instead of failing the batch.
RewriteResult rewrite_dataset(const std::vector<TaskInstance>& tasks, const SchemaMap& schemas);

std::string rejected_to_json(const std::vector<RejectedTask>& rejected);

}  // namespace nsql
