#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nsql/schema.hpp"
#include "nsql/value.hpp"

struct sqlite3;

namespace nsql {

struct ResultSet {
  std::vector<std::string> column_names;
  /// Per-column type from the first row's storage classes (Other when empty).
  std::vector<ColumnType> column_types;
  std::vector<Row> rows;
  /// Set when the row cap stopped materialization early.
  bool truncated = false;
};

struct RuntimeFailure {
  std::string message;
};

struct Timeout {};

using ExecutionResult = std::variant<ResultSet, RuntimeFailure, Timeout>;

inline constexpr std::chrono::milliseconds kDefaultQueryTimeout{1000};
inline constexpr std::size_t kDefaultRowCap = 100000;

/// Multiset equality under values_equal; `ordered` additionally compares row order.
bool same_rows(const std::vector<Row>& a, const std::vector<Row>& b, bool ordered);

/// Writes a fresh database file (replacing any existing one) from an SQL script.
void create_database(const std::filesystem::path& file, std::string_view script);

/// Read-only handle to one task database. Each thread should hold its own handle.
class TaskDatabase {
 public:
  /// Opens `<db_root>/<db_id>/<db_id>.sqlite`.
  static TaskDatabase open(const std::filesystem::path& db_root, const std::string& db_id);
  static TaskDatabase open_file(const std::filesystem::path& file, std::string db_id);

  TaskDatabase(TaskDatabase&&) noexcept = default;
  TaskDatabase& operator=(TaskDatabase&&) noexcept = default;
  ~TaskDatabase();

  /// A fresh handle on the same file.
  TaskDatabase reopen() const { return open_file(path_, db_id_); }

  const std::string& db_id() const { return db_id_; }
  const std::filesystem::path& path() const { return path_; }

  /// Runs one read-only statement. Failures and timeouts are returned as data.
  ExecutionResult run(std::string_view sql, std::chrono::milliseconds timeout = kDefaultQueryTimeout,
                      std::size_t row_cap = kDefaultRowCap) const;

  /// Differences between the live database and `schema`; empty when they agree.
  std::vector<std::string> validate(const DatabaseSchema& schema) const;

  /// Retypes Integer columns that hold fractional reals as Real.
  void refine_types(DatabaseSchema& schema) const;

 private:
  struct Closer {
    void operator()(sqlite3* db) const;
  };

  TaskDatabase(std::unique_ptr<sqlite3, Closer> handle, std::filesystem::path path, std::string db_id);

  std::unique_ptr<sqlite3, Closer> handle_;
  std::filesystem::path path_;
  std::string db_id_;
};

}  // namespace nsql
