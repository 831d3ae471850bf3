#include "nsql/rewrite.hpp"

#include "json.hpp"

#include "nsql/error.hpp"
#include "nsql/normalize.hpp"
#include "nsql/render.hpp"

namespace nsql {

RewriteResult rewrite_dataset(const std::vector<TaskInstance>& tasks, const SchemaMap& schemas) {
  RewriteResult out;
  for (const auto& task : tasks) {
    auto schema = schemas.find(task.db_id);
    if (schema == schemas.end()) {
      out.rejected.push_back({task.id, std::string(to_string(Errc::UnknownDbId))});
      continue;
    }
    if (!task.gold_query) {
      out.rejected.push_back({task.id, "no gold query"});
      continue;
    }
    try {
      TaskInstance normalized = task;
      normalized.gold_query = render(normalize(*task.gold_query, schema->second));
      out.normalized.push_back(std::move(normalized));
    } catch (const Error& e) {
      out.rejected.push_back({task.id, e.what()});
    }
  }
  return out;
}

std::string rejected_to_json(const std::vector<RejectedTask>& rejected) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : rejected) doc.push_back({{"id", r.id}, {"reason", r.reason}});
  return doc.dump(2) + "\n";
}

}  // namespace nsql
