#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nsql {

using TokenId = std::uint32_t;

struct TokenCandidate {
  TokenId token_id = 0;
  std::string surface;
  /// Raw model probability in (0, 1]; never renormalized over the top k.
  double prob = 0;

  bool operator==(const TokenCandidate&) const = default;
};

struct GenerationSession {
  std::string task_text;
  std::vector<TokenId> prefix;
  /// Adapter-private routing state fixed at session start.
  std::size_t binding = 0;
};

/// Top-k next-token source over adapter-owned tokenization.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual GenerationSession start_session(const std::string& task_text) const = 0;

  /// At most k candidates, sorted by descending probability; may contain eos_token().
  virtual std::vector<TokenCandidate> top_candidates(const GenerationSession& session, std::size_t k) const = 0;

  /// Concatenated surfaces. Throws Error(UnknownToken) for ids this adapter never issued.
  virtual std::string decode(std::span<const TokenId> tokens) const = 0;

  virtual TokenId eos_token() const = 0;
};

/// Sorts by descending probability, then ascending token id, and keeps the first k.
void order_candidates(std::vector<TokenCandidate>& candidates, std::size_t k);

}  // namespace nsql
