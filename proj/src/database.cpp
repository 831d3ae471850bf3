#include "nsql/database.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <sqlite3.h>

#include "nsql/error.hpp"

namespace nsql {

namespace {

using Clock = std::chrono::steady_clock;

int interrupt_after_deadline(void* arg) {
  const auto* deadline = static_cast<const Clock::time_point*>(arg);
  return Clock::now() > *deadline ? 1 : 0;
}

struct StatementCloser {
  void operator()(sqlite3_stmt* stmt) const { sqlite3_finalize(stmt); }
};
using Statement = std::unique_ptr<sqlite3_stmt, StatementCloser>;

Value read_value(sqlite3_stmt* stmt, int col) {
  switch (sqlite3_column_type(stmt, col)) {
    case SQLITE_INTEGER: return static_cast<std::int64_t>(sqlite3_column_int64(stmt, col));
    case SQLITE_FLOAT: return sqlite3_column_double(stmt, col);
    case SQLITE_TEXT: {
      const auto* text = reinterpret_cast<const char*>(sqlite3_column_text(stmt, col));
      return std::string(text, static_cast<std::size_t>(sqlite3_column_bytes(stmt, col)));
    }
    case SQLITE_BLOB: {
      const auto* data = static_cast<const char*>(sqlite3_column_blob(stmt, col));
      return std::string(data ? data : "", static_cast<std::size_t>(sqlite3_column_bytes(stmt, col)));
    }
    default: return Null{};
  }
}

std::string quote_identifier(std::string_view name) {
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

bool only_whitespace(const char* tail) {
  for (; tail && *tail; ++tail)
    if (*tail != ' ' && *tail != '\n' && *tail != '\t' && *tail != '\r' && *tail != ';') return false;
  return true;
}

}  // namespace

bool same_rows(const std::vector<Row>& a, const std::vector<Row>& b, bool ordered) {
  if (a.size() != b.size()) return false;
  if (ordered) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!rows_equal(a[i], b[i])) return false;
    return true;
  }
  auto row_less = [](const Row& x, const Row& y) {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(), value_less);
  };
  auto sa = a, sb = b;
  std::sort(sa.begin(), sa.end(), row_less);
  std::sort(sb.begin(), sb.end(), row_less);
  for (std::size_t i = 0; i < sa.size(); ++i)
    if (!rows_equal(sa[i], sb[i])) return false;
  return true;
}

void create_database(const std::filesystem::path& file, std::string_view script) {
  std::error_code ec;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
  std::filesystem::remove(file, ec);
  sqlite3* raw = nullptr;
  int rc = sqlite3_open_v2(file.c_str(), &raw, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr);
  std::unique_ptr<sqlite3, decltype(&sqlite3_close_v2)> handle(raw, &sqlite3_close_v2);
  if (rc != SQLITE_OK)
    throw Error(Errc::DatabaseUnavailable, fmt::format("cannot create '{}'", file.string()));
  char* message = nullptr;
  std::string sql(script);
  if (sqlite3_exec(raw, sql.c_str(), nullptr, nullptr, &message) != SQLITE_OK) {
    std::string text = message ? message : "unknown error";
    sqlite3_free(message);
    throw Error(Errc::ExecutionError, fmt::format("'{}': {}", file.string(), text));
  }
}

void TaskDatabase::Closer::operator()(sqlite3* db) const { sqlite3_close_v2(db); }

TaskDatabase::TaskDatabase(std::unique_ptr<sqlite3, Closer> handle, std::filesystem::path path, std::string db_id)
    : handle_(std::move(handle)), path_(std::move(path)), db_id_(std::move(db_id)) {}

TaskDatabase::~TaskDatabase() = default;

TaskDatabase TaskDatabase::open(const std::filesystem::path& db_root, const std::string& db_id) {
  return open_file(db_root / db_id / (db_id + ".sqlite"), db_id);
}

TaskDatabase TaskDatabase::open_file(const std::filesystem::path& file, std::string db_id) {
  if (!std::filesystem::exists(file))
    throw Error(Errc::DatabaseUnavailable, fmt::format("no database file '{}'", file.string()));
  sqlite3* raw = nullptr;
  int rc = sqlite3_open_v2(file.c_str(), &raw, SQLITE_OPEN_READONLY | SQLITE_OPEN_NOMUTEX, nullptr);
  std::unique_ptr<sqlite3, Closer> handle(raw);
  if (rc != SQLITE_OK)
    throw Error(Errc::DatabaseUnavailable,
                fmt::format("cannot open '{}': {}", file.string(), raw ? sqlite3_errmsg(raw) : "out of memory"));
  return TaskDatabase(std::move(handle), file, std::move(db_id));
}

ExecutionResult TaskDatabase::run(std::string_view sql, std::chrono::milliseconds timeout, std::size_t row_cap) const {
  sqlite3* db = handle_.get();
  sqlite3_stmt* raw = nullptr;
  const char* tail = nullptr;
  int rc = sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &raw, &tail);
  Statement stmt(raw);
  if (rc != SQLITE_OK) return RuntimeFailure{sqlite3_errmsg(db)};
  if (!stmt) return RuntimeFailure{"empty statement"};
  if (tail && tail < sql.data() + sql.size() && !only_whitespace(std::string(tail, sql.data() + sql.size()).c_str()))
    return RuntimeFailure{"multiple statements"};
  if (!sqlite3_stmt_readonly(stmt.get())) return RuntimeFailure{"statement is not read-only"};

  Clock::time_point deadline = Clock::now() + timeout;
  sqlite3_progress_handler(db, 1000, interrupt_after_deadline, &deadline);
  struct ResetHandler {
    sqlite3* db;
    ~ResetHandler() { sqlite3_progress_handler(db, 0, nullptr, nullptr); }
  } reset{db};

  ResultSet result;
  int columns = sqlite3_column_count(stmt.get());
  for (int c = 0; c < columns; ++c) {
    const char* name = sqlite3_column_name(stmt.get(), c);
    result.column_names.emplace_back(name ? name : "");
  }
  while (true) {
    rc = sqlite3_step(stmt.get());
    if (rc == SQLITE_DONE) break;
    if (rc == SQLITE_ROW) {
      if (result.rows.size() >= row_cap) {
        result.truncated = true;
        break;
      }
      Row row;
      row.reserve(columns);
      for (int c = 0; c < columns; ++c) row.push_back(read_value(stmt.get(), c));
      result.rows.push_back(std::move(row));
      continue;
    }
    if (rc == SQLITE_INTERRUPT) return Timeout{};
    return RuntimeFailure{sqlite3_errmsg(db)};
  }
  for (int c = 0; c < columns; ++c)
    result.column_types.push_back(result.rows.empty() ? ColumnType::Other : storage_type(result.rows.front()[c]));
  return result;
}

std::vector<std::string> TaskDatabase::validate(const DatabaseSchema& schema) const {
  std::vector<std::string> problems;
  auto listing = run("SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%'");
  if (const auto* failure = std::get_if<RuntimeFailure>(&listing)) return {failure->message};
  std::set<std::string> live_tables;
  for (const auto& row : std::get<ResultSet>(listing).rows) live_tables.insert(to_lower(std::get<std::string>(row[0])));

  std::set<std::string> declared_tables;
  for (const auto& table : schema.tables) {
    declared_tables.insert(to_lower(table.name));
    if (!live_tables.count(to_lower(table.name))) {
      problems.push_back(fmt::format("table '{}' missing from database", table.name));
      continue;
    }
    auto info = run(fmt::format("SELECT name FROM pragma_table_info({})", to_literal(Value{table.name})));
    if (const auto* failure = std::get_if<RuntimeFailure>(&info)) {
      problems.push_back(failure->message);
      continue;
    }
    std::set<std::string> live_columns;
    for (const auto& row : std::get<ResultSet>(info).rows) live_columns.insert(to_lower(std::get<std::string>(row[0])));
    std::set<std::string> declared_columns;
    for (const auto& column : table.columns) {
      declared_columns.insert(to_lower(column.name));
      if (!live_columns.count(to_lower(column.name)))
        problems.push_back(fmt::format("column '{}.{}' missing from database", table.name, column.name));
    }
    for (const auto& live : live_columns)
      if (!declared_columns.count(live))
        problems.push_back(fmt::format("column '{}.{}' not declared in schema", table.name, live));
  }
  for (const auto& live : live_tables)
    if (!declared_tables.count(live)) problems.push_back(fmt::format("table '{}' not declared in schema", live));
  return problems;
}

void TaskDatabase::refine_types(DatabaseSchema& schema) const {
  for (auto& table : schema.tables) {
    for (auto& column : table.columns) {
      if (column.type != ColumnType::Integer) continue;
      auto col = quote_identifier(column.name);
      auto probe = run(fmt::format("SELECT 1 FROM {} WHERE typeof({}) = 'real' AND {} <> CAST({} AS INTEGER) LIMIT 1",
                                   quote_identifier(table.name), col, col, col));
      if (const auto* rows = std::get_if<ResultSet>(&probe); rows && !rows->rows.empty()) column.type = ColumnType::Real;
    }
  }
}

}  // namespace nsql
