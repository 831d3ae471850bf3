#include "fixtures.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include <unistd.h>

#include "nsql/rewrite.hpp"

namespace fs = std::filesystem;

namespace fixtures {

namespace {

struct Scratch {
  fs::path path;
  Scratch() {
    path = fs::temp_directory_path() / ("nsql-test-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& file) {
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

fs::path source_dir() { return NSQL_FIXTURE_DIR; }

fs::path scratch_dir() {
  static Scratch scratch;
  return scratch.path;
}

fs::path make_db(const std::string& name, const std::string& script) {
  fs::path root = scratch_dir() / "extra";
  nsql::create_database(root / name / (name + ".sqlite"), script);
  return root;
}

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus out;
    out.db_root = scratch_dir() / "db";
    for (const auto& entry : fs::directory_iterator(source_dir() / "sql")) {
      if (entry.path().extension() != ".sql") continue;
      auto name = entry.path().stem().string();
      nsql::create_database(out.db_root / name / (name + ".sqlite"), slurp(entry.path()));
    }
    out.raw = nsql::load_dataset(source_dir() / "tables.json", source_dir() / "dev.json", out.db_root);
    out.normalized = out.raw;
    out.normalized.tasks = nsql::rewrite_dataset(out.raw.tasks, out.raw.schemas).normalized;
    return out;
  }();
  return c;
}

const nsql::DatabaseSchema& Corpus::schema(const std::string& db_id) const { return raw.schemas.at(db_id); }

nsql::TaskDatabase Corpus::db(const std::string& db_id) const { return nsql::TaskDatabase::open(db_root, db_id); }

const nsql::TaskInstance& Corpus::task(const std::string& id) const {
  for (const auto& t : normalized.tasks)
    if (t.id == id) return t;
  throw std::out_of_range(id);
}

nsql::Dataset subset(const std::vector<std::string>& ids) {
  nsql::Dataset out = corpus().normalized;
  if (ids.empty()) return out;
  out.tasks.clear();
  for (const auto& id : ids) out.tasks.push_back(corpus().task(id));
  return out;
}

}  // namespace fixtures
