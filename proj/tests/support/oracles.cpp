#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle {

long double product(const std::vector<double>& probs) {
  long double p = 1;
  for (double x : probs) p *= static_cast<long double>(x);
  return p;
}

std::vector<std::string> token_prefixes(const std::string& text) {
  std::vector<std::string> out;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\'') quoted = !quoted;
    if (!quoted && (text[i] == ' ' || text[i] == '\n')) out.push_back(text.substr(0, i + 1));
  }
  if (out.empty() || out.back() != text) out.push_back(text);
  return out;
}

std::vector<Sequence> enumerate(const nsql::LanguageModel& model, const std::string& task, std::size_t limit) {
  std::vector<Sequence> out;
  nsql::GenerationSession session = model.start_session(task);
  std::function<void(Sequence&)> walk = [&](Sequence& cur) {
    if (out.size() >= limit) return;
    session.prefix = cur.tokens;
    auto candidates = model.top_candidates(session, 1u << 20);
    for (const auto& c : candidates) {
      Sequence next = cur;
      next.tokens.push_back(c.token_id);
      next.prob *= static_cast<long double>(c.prob);
      if (c.token_id == model.eos_token()) {
        out.push_back(std::move(next));
        continue;
      }
      next.text += c.surface;
      walk(next);
    }
  };
  Sequence root;
  walk(root);
  return out;
}

namespace {

bool same_value(const nsql::Value& a, const nsql::Value& b) {
  auto number = [](const nsql::Value& v, long double& out) {
    if (auto* i = std::get_if<std::int64_t>(&v)) return out = static_cast<long double>(*i), true;
    if (auto* d = std::get_if<double>(&v)) return out = *d, true;
    return false;
  };
  long double x, y;
  if (number(a, x) && number(b, y)) return x == y;
  if (auto* s = std::get_if<std::string>(&a))
    if (auto* t = std::get_if<std::string>(&b)) return *s == *t;
  return std::holds_alternative<nsql::Null>(a) && std::holds_alternative<nsql::Null>(b);
}

std::vector<std::string> words(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '\'') quoted = !quoted;
    if (c == ' ' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

bool contains_all(const std::vector<nsql::Row>& rows, const std::vector<nsql::ExampleTuple>& examples) {
  for (const auto& ex : examples) {
    bool found = false;
    for (const auto& row : rows) {
      if (row.size() != ex.values.size()) continue;
      bool eq = true;
      for (std::size_t i = 0; i < row.size() && eq; ++i) eq = same_value(row[i], ex.values[i]);
      if (eq) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::vector<Corruption> corruptions(const std::string& text, const nsql::DatabaseSchema& schema) {
  static const std::vector<std::string> aggs = {"COUNT", "SUM", "AVG", "MIN", "MAX"};
  static const std::vector<std::string> conns = {"AND", "OR"};
  static const std::vector<std::string> comps = {"=", "!=", "<", "<=", ">", ">="};
  std::vector<std::string> cols;
  for (const auto& t : schema.tables)
    for (const auto& c : t.columns) cols.push_back(t.name + "." + c.name);

  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }

  std::vector<Corruption> out;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    auto w = words(lines[li]);
    const bool from_line = w[0] == "FROM";
    for (std::size_t i = 1; i < w.size(); ++i) {
      const std::string& lex = w[i];
      const std::vector<std::string>* members = nullptr;
      std::string cls;
      if (std::find(aggs.begin(), aggs.end(), lex) != aggs.end()) {
        members = &aggs, cls = "aggregation";
      } else if (!from_line && std::find(conns.begin(), conns.end(), lex) != conns.end()) {
        // BETWEEN low AND high keeps its AND.
        if (lex == "AND" && i >= 2 && w[i - 2] == "BETWEEN") continue;
        members = &conns, cls = "connective";
      } else if (!from_line && std::find(comps.begin(), comps.end(), lex) != comps.end()) {
        members = &comps, cls = "comparison";
      } else if (lex.find('.') != std::string::npos && lex[0] != '\'' && !std::isdigit(static_cast<unsigned char>(lex[0])) &&
                 lex[0] != '-') {
        members = &cols, cls = "column";
      }
      if (!members) continue;
      for (const auto& m : *members) {
        if (m == lex) continue;
        auto changed = w;
        changed[i] = m;
        auto all = lines;
        all[li] = join(changed, ' ');
        out.push_back({join(all, '\n') + "\n", cls, lex, m});
      }
    }
  }
  return out;
}

}  // namespace oracle
