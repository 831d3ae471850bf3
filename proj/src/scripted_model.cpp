#include "nsql/scripted_model.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "nsql/error.hpp"
#include "nsql/partial.hpp"

namespace nsql {

using nlohmann::json;

namespace {

constexpr std::size_t kNoSkip = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kUnbound = std::numeric_limits<std::size_t>::max();

bool active_at(const ScriptedNoise& noise, std::size_t step) {
  return noise.steps.empty() || std::find(noise.steps.begin(), noise.steps.end(), step) != noise.steps.end();
}

}  // namespace

void order_candidates(std::vector<TokenCandidate>& candidates, std::size_t k) {
  std::stable_sort(candidates.begin(), candidates.end(), [](const TokenCandidate& a, const TokenCandidate& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.token_id < b.token_id;
  });
  if (candidates.size() > k) candidates.resize(k);
}

ScriptedModel::ScriptedModel(std::vector<ScriptedRoute> routes) : routes_(std::move(routes)) {
  surfaces_.push_back("");
  for (const auto& route : routes_) {
    double total = 0;
    for (const auto& path : route.paths) {
      if (!(path.prob > 0 && path.prob <= 1))
        throw Error(Errc::ConfigError, fmt::format("route '{}': path probability {} outside (0, 1]", route.key, path.prob));
      if (path.tokens.empty()) throw Error(Errc::ConfigError, fmt::format("route '{}': empty path", route.key));
      total += path.prob;
    }
    if (total > 1 + 1e-9) throw Error(Errc::ConfigError, fmt::format("route '{}': path probabilities exceed 1", route.key));
    // Mass offered at any one step must stay below 1.
    double always = 0;
    std::map<std::size_t, double> at_step;
    for (const auto& noise : route.noise) {
      if (!(noise.mass > 0 && noise.mass < 1) || noise.surface.empty())
        throw Error(Errc::ConfigError, fmt::format("route '{}': bad distractor '{}'", route.key, noise.surface));
      if (noise.steps.empty()) always += noise.mass;
      for (auto step : std::set<std::size_t>(noise.steps.begin(), noise.steps.end())) at_step[step] += noise.mass;
    }
    double peak = 0;
    for (const auto& [step, mass] : at_step) peak = std::max(peak, mass);
    if (always + peak >= 1)
      throw Error(Errc::ConfigError, fmt::format("route '{}': distractor mass reaches 1", route.key));
  }
  for (const auto& route : routes_) {
    RouteIds ids;
    for (const auto& path : route.paths) {
      PathIds p{{}, path.prob};
      for (const auto& surface : path.tokens) {
        if (surface.empty()) throw Error(Errc::ConfigError, "empty token surface");
        p.tokens.push_back(intern(surface));
      }
      ids.paths.push_back(std::move(p));
    }
    route_ids_.push_back(std::move(ids));
  }
  for (std::size_t r = 0; r < routes_.size(); ++r)
    for (const auto& noise : routes_[r].noise) route_ids_[r].noise.emplace_back(intern(noise.surface), &noise);
}

TokenId ScriptedModel::intern(const std::string& surface) {
  auto it = ids_.find(surface);
  if (it != ids_.end()) return it->second;
  auto id = static_cast<TokenId>(surfaces_.size());
  surfaces_.push_back(surface);
  ids_.emplace(surface, id);
  return id;
}

ScriptedModel ScriptedModel::from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  std::vector<ScriptedRoute> routes;
  try {
    for (const auto& r : doc.at("routes")) {
      ScriptedRoute route;
      route.key = r.value("key", "");
      for (const auto& p : r.at("paths")) {
        ScriptedPath path;
        if (p.contains("text"))
          path.tokens = split_surface_tokens(p.at("text").get<std::string>());
        else
          path.tokens = p.at("tokens").get<std::vector<std::string>>();
        path.prob = p.at("prob").get<double>();
        route.paths.push_back(std::move(path));
      }
      if (r.contains("noise")) {
        for (const auto& n : r.at("noise")) {
          ScriptedNoise noise;
          noise.surface = n.at("surface").get<std::string>();
          noise.mass = n.at("mass").get<double>();
          noise.valid = n.value("valid", false);
          noise.recover = n.value("recover", false);
          if (n.contains("steps")) noise.steps = n.at("steps").get<std::vector<std::size_t>>();
          route.noise.push_back(std::move(noise));
        }
      }
      routes.push_back(std::move(route));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  return ScriptedModel(std::move(routes));
}

ScriptedModel ScriptedModel::load(const std::filesystem::path& spec_file) {
  std::ifstream in(spec_file);
  if (!in) throw Error(Errc::ConfigError, fmt::format("cannot open scripted spec '{}'", spec_file.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::string ScriptedModel::to_json() const {
  json routes = json::array();
  for (const auto& route : routes_) {
    json paths = json::array();
    for (const auto& p : route.paths) paths.push_back({{"tokens", p.tokens}, {"prob", p.prob}});
    json noise = json::array();
    for (const auto& n : route.noise) {
      json entry = {{"surface", n.surface}, {"mass", n.mass}, {"valid", n.valid}, {"recover", n.recover}};
      if (!n.steps.empty()) entry["steps"] = n.steps;
      noise.push_back(std::move(entry));
    }
    routes.push_back({{"key", route.key}, {"paths", paths}, {"noise", noise}});
  }
  return json{{"routes", routes}}.dump(2) + "\n";
}

GenerationSession ScriptedModel::start_session(const std::string& task_text) const {
  GenerationSession session{task_text, {}, kUnbound};
  for (std::size_t r = 0; r < routes_.size(); ++r) {
    if (task_text.find(routes_[r].key) != std::string::npos) {
      session.binding = r;
      break;
    }
  }
  return session;
}

std::vector<TokenCandidate> ScriptedModel::on_path(const RouteIds& route, std::span<const TokenId> prefix,
                                                   std::size_t skip_at, bool noisy) const {
  const std::size_t depth = prefix.size();
  double weight = 0;
  double ended = 0;
  std::vector<std::pair<TokenId, double>> next;
  for (const auto& path : route.paths) {
    if (path.tokens.size() < depth) continue;
    bool live = true;
    for (std::size_t i = 0; i < depth && live; ++i)
      if (i != skip_at && path.tokens[i] != prefix[i]) live = false;
    if (!live) continue;
    weight += path.prob;
    if (path.tokens.size() == depth) {
      ended += path.prob;
      continue;
    }
    TokenId t = path.tokens[depth];
    auto it = std::find_if(next.begin(), next.end(), [&](const auto& e) { return e.first == t; });
    if (it == next.end())
      next.emplace_back(t, path.prob);
    else
      it->second += path.prob;
  }
  if (weight <= 0) return {};
  if (depth == 0) weight = 1;

  std::vector<TokenCandidate> out;
  double scale = 1;
  if (noisy) {
    double mass = 0;
    for (const auto& [id, noise] : route.noise) {
      if (!active_at(*noise, depth)) continue;
      bool on_path = std::any_of(next.begin(), next.end(), [&](const auto& e) { return e.first == id; });
      bool repeated = std::any_of(out.begin(), out.end(), [&](const auto& c) { return c.token_id == id; });
      if (on_path || repeated) continue;
      out.push_back({id, surfaces_[id], noise->mass});
      mass += noise->mass;
    }
    scale = 1 - mass;
  }
  for (const auto& [id, w] : next) out.push_back({id, surfaces_[id], scale * w / weight});
  if (ended > 0) out.push_back({eos_token(), "", scale * ended / weight});
  return out;
}

std::vector<TokenCandidate> ScriptedModel::top_candidates(const GenerationSession& session, std::size_t k) const {
  if (session.binding >= route_ids_.size() || k == 0) return {};
  const auto& route = route_ids_[session.binding];
  std::span<const TokenId> prefix = session.prefix;
  if (std::find(prefix.begin(), prefix.end(), eos_token()) != prefix.end()) return {};

  std::size_t live = 0;
  for (const auto& path : route.paths) {
    std::size_t common = 0;
    while (common < prefix.size() && common < path.tokens.size() && path.tokens[common] == prefix[common]) ++common;
    live = std::max(live, common);
  }

  std::vector<TokenCandidate> out;
  if (live == prefix.size()) {
    out = on_path(route, prefix, kNoSkip, true);
  } else {
    TokenId deviation = prefix[live];
    const ScriptedNoise* noise = nullptr;
    for (const auto& [id, n] : route.noise)
      if (id == deviation && active_at(*n, live)) noise = n;
    if (!noise || !noise->recover) return {};
    out = on_path(route, prefix, live, false);
  }
  order_candidates(out, k);
  return out;
}

std::string ScriptedModel::decode(std::span<const TokenId> tokens) const {
  std::string text;
  for (TokenId id : tokens) {
    if (id >= surfaces_.size()) throw Error(Errc::UnknownToken, fmt::format("token id {}", id));
    text += surfaces_[id];
  }
  return text;
}

std::optional<TokenId> ScriptedModel::token_of(std::string_view surface) const {
  auto it = ids_.find(surface);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<TokenId> ScriptedModel::encode(std::string_view text) const {
  std::vector<TokenId> out;
  for (const auto& surface : split_surface_tokens(text)) {
    auto id = token_of(surface);
    if (!id) throw Error(Errc::UnknownToken, fmt::format("surface '{}'", surface));
    out.push_back(*id);
  }
  return out;
}

}  // namespace nsql
