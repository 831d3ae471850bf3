#include "nsql/http_model.hpp"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>
#include "httplib.h"
#include "json.hpp"

#include "nsql/error.hpp"

namespace nsql {

using nlohmann::json;

HttpModelConfig http_config_from_env(std::string url) {
  HttpModelConfig config;
  config.url = std::move(url);
  if (const char* token = std::getenv(kAuthTokenEnv); token && *token) config.auth_token = token;
  return config;
}

HttpModel::HttpModel(HttpModelConfig config) : config_(std::move(config)) {
  const std::string scheme = "http://";
  if (config_.url.rfind(scheme, 0) != 0)
    throw Error(Errc::ConfigError, fmt::format("model URL must start with http://, got '{}'", config_.url));
  auto rest = config_.url.substr(scheme.size());
  auto slash = rest.find('/');
  host_ = scheme + rest.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : rest.substr(slash);
  if (rest.substr(0, slash).empty()) throw Error(Errc::ConfigError, "model URL has no host");
  surfaces_.push_back("");
}

HttpModel::~HttpModel() = default;

TokenId HttpModel::intern(const std::string& surface) const {
  std::lock_guard lock(mutex_);
  auto it = ids_.find(surface);
  if (it != ids_.end()) return it->second;
  auto id = static_cast<TokenId>(surfaces_.size());
  surfaces_.push_back(surface);
  ids_.emplace(surface, id);
  return id;
}

std::vector<TokenCandidate> HttpModel::request(const std::string& task, const std::string& prefix, std::size_t k) const {
  httplib::Client client(host_);
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  httplib::Headers headers;
  if (config_.auth_token) headers.emplace("Authorization", "Bearer " + *config_.auth_token);

  json body = {{"task", task}, {"prefix", prefix}, {"k", k}};
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw Error(Errc::AdapterUnavailable, fmt::format("{}: {}", config_.url, httplib::to_string(res.error())));
  if (res->status != 200) throw Error(Errc::AdapterUnavailable, fmt::format("{}: HTTP {}", config_.url, res->status));

  std::vector<TokenCandidate> out;
  try {
    json reply = json::parse(res->body);
    for (const auto& c : reply.at("candidates")) {
      auto text = c.at("text").get<std::string>();
      double logprob = c.at("logprob").get<double>();
      if (text.empty() || !(logprob <= 0)) throw Error(Errc::ProtocolError, "candidate must have text and logprob <= 0");
      out.push_back({intern(text), text, std::exp(logprob)});
    }
    if (reply.contains("eos_logprob") && !reply.at("eos_logprob").is_null()) {
      double logprob = reply.at("eos_logprob").get<double>();
      if (!(logprob <= 0)) throw Error(Errc::ProtocolError, "eos_logprob must be <= 0");
      out.push_back({eos_token(), "", std::exp(logprob)});
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ProtocolError, e.what());
  }
  std::erase_if(out, [](const TokenCandidate& c) { return !(c.prob > 0); });
  order_candidates(out, k);
  return out;
}

GenerationSession HttpModel::start_session(const std::string& task_text) const {
  // Probes the server so unreachable endpoints fail at session start.
  request(task_text, "", 1);
  return GenerationSession{task_text, {}, 0};
}

std::vector<TokenCandidate> HttpModel::top_candidates(const GenerationSession& session, std::size_t k) const {
  return request(session.task_text, decode(session.prefix), k);
}

std::string HttpModel::decode(std::span<const TokenId> tokens) const {
  std::lock_guard lock(mutex_);
  std::string text;
  for (TokenId id : tokens) {
    if (id >= surfaces_.size()) throw Error(Errc::UnknownToken, fmt::format("token id {}", id));
    text += surfaces_[id];
  }
  return text;
}

}  // namespace nsql
