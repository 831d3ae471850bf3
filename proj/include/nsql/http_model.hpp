#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "nsql/lm.hpp"

namespace nsql {

struct HttpModelConfig {
  /// Endpoint such as "http://localhost:8080/complete".
  std::string url;
  std::chrono::milliseconds timeout{30000};
  /// Sent as a bearer token when set.
  std::optional<std::string> auth_token;
};

/// Environment variable read by http_config_from_env for the auth token.
inline constexpr const char* kAuthTokenEnv = "NSQLGEN_API_TOKEN";

HttpModelConfig http_config_from_env(std::string url);

/// Client for a completion server speaking
///   request  {task, prefix, k}
///   response {candidates: [{text, logprob}], eos_logprob}
/// Surfaces are interned into token ids on first sight; safe for concurrent sessions.
class HttpModel : public LanguageModel {
 public:
  explicit HttpModel(HttpModelConfig config);
  ~HttpModel() override;

  GenerationSession start_session(const std::string& task_text) const override;
  std::vector<TokenCandidate> top_candidates(const GenerationSession& session, std::size_t k) const override;
  std::string decode(std::span<const TokenId> tokens) const override;
  TokenId eos_token() const override { return 0; }

 private:
  TokenId intern(const std::string& surface) const;
  std::vector<TokenCandidate> request(const std::string& task, const std::string& prefix, std::size_t k) const;

  HttpModelConfig config_;
  std::string host_;
  std::string path_;

  mutable std::mutex mutex_;
  mutable std::vector<std::string> surfaces_;
  mutable std::map<std::string, TokenId, std::less<>> ids_;
};

}  // namespace nsql
