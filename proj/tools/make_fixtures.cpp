// make_fixtures: builds SQLite fixture databases and scripted model specs.

#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "nsql/error.hpp"
#include "nsql/scripted_suite.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Build fixture databases and scripted model specs"};
  app.require_subcommand(1);

  auto* db = app.add_subcommand("db", "create <out>/<name>/<name>.sqlite from every <name>.sql");
  std::string sql_dir, out_root;
  db->add_option("--sql-dir", sql_dir)->required();
  db->add_option("--out", out_root)->required();

  auto* spec = app.add_subcommand("spec", "write a scripted model spec for a dataset");
  std::string tables, dataset, db_root, kind = "clean", out_file;
  spec->add_option("--tables", tables)->required();
  spec->add_option("--dataset", dataset)->required();
  spec->add_option("--db-root", db_root)->required();
  spec->add_option("--kind", kind)->check(CLI::IsMember({"clean", "noisy", "corrupted", "seeded"}));
  spec->add_option("--out", out_file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*db) {
      std::size_t n = 0;
      for (const auto& entry : fs::directory_iterator(sql_dir)) {
        if (entry.path().extension() != ".sql") continue;
        std::ifstream in(entry.path());
        std::stringstream script;
        script << in.rdbuf();
        auto name = entry.path().stem().string();
        nsql::create_database(fs::path(out_root) / name / (name + ".sqlite"), script.str());
        ++n;
      }
      std::cout << fmt::format("built {} databases under {}\n", n, out_root);
    } else {
      auto data = nsql::load_dataset(tables, dataset, db_root);
      nsql::SuiteKind suite = kind == "noisy"       ? nsql::SuiteKind::Noisy
                              : kind == "corrupted" ? nsql::SuiteKind::Corrupted
                              : kind == "seeded"    ? nsql::SuiteKind::SeededErrors
                                                    : nsql::SuiteKind::Clean;
      auto model = nsql::build_suite(data, suite);
      std::ofstream out(out_file);
      if (!out) throw nsql::Error(nsql::Errc::ConfigError, fmt::format("cannot write '{}'", out_file));
      out << model.to_json() << '\n';
      std::cout << fmt::format("wrote {} routes to {}\n", model.routes().size(), out_file);
    }
  } catch (const nsql::Error& e) {
    std::cerr << "make_fixtures: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
