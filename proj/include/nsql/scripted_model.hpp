#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nsql/lm.hpp"

namespace nsql {

struct ScriptedPath {
  std::vector<std::string> tokens;
  double prob = 0;
};

/// A distractor token offered next to the on-path continuation.
struct ScriptedNoise {
  std::string surface;
  double mass = 0;
  /// Informational: whether the distractor keeps the query viable.
  bool valid = false;
  /// After the distractor, continue the scripted suffix as if it replaced the on-path token.
  bool recover = false;
  /// Steps (token positions) where the distractor is offered; empty means every step.
  std::vector<std::size_t> steps;
};

struct ScriptedRoute {
  /// Sessions whose task text contains the key bind to this route; "" matches all.
  std::string key;
  std::vector<ScriptedPath> paths;
  std::vector<ScriptedNoise> noise;
};

/// Deterministic language model emitting configured token paths.
///
/// On path, P(t | y) is the weight of paths continuing y with t over the weight of
/// paths through y (the root counts as weight 1); EOS gets the weight of paths ending
/// at y. Active distractors take their mass and scale the on-path candidates by
/// (1 - total mass).
class ScriptedModel : public LanguageModel {
 public:
  explicit ScriptedModel(std::vector<ScriptedRoute> routes);

  static ScriptedModel from_json(std::string_view json_text);
  static ScriptedModel load(const std::filesystem::path& spec_file);
  std::string to_json() const;

  GenerationSession start_session(const std::string& task_text) const override;
  std::vector<TokenCandidate> top_candidates(const GenerationSession& session, std::size_t k) const override;
  std::string decode(std::span<const TokenId> tokens) const override;
  TokenId eos_token() const override { return 0; }

  /// Lexeme-level tokenization. Throws Error(UnknownToken) for surfaces outside the vocabulary.
  std::vector<TokenId> encode(std::string_view text) const;
  std::optional<TokenId> token_of(std::string_view surface) const;
  const std::vector<ScriptedRoute>& routes() const { return routes_; }

 private:
  struct PathIds {
    std::vector<TokenId> tokens;
    double prob;
  };
  struct RouteIds {
    std::vector<PathIds> paths;
    std::vector<std::pair<TokenId, const ScriptedNoise*>> noise;
  };

  TokenId intern(const std::string& surface);
  std::vector<TokenCandidate> on_path(const RouteIds& route, std::span<const TokenId> prefix,
                                      std::size_t skip_at, bool noisy) const;

  std::vector<ScriptedRoute> routes_;
  std::vector<RouteIds> route_ids_;
  std::vector<std::string> surfaces_;
  std::map<std::string, TokenId, std::less<>> ids_;
};

}  // namespace nsql
