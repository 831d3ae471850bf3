#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "nsql/checker.hpp"
#include "nsql/lm.hpp"
#include "nsql/sql_ast.hpp"

namespace nsql {

using Clock = std::chrono::steady_clock;

enum class AttemptMode { SingleAttempt, MultipleAttempts };

std::string_view to_string(AttemptMode mode);

struct SearchConfig {
  std::size_t k = 5;
  double time_limit_s = 60;
  AttemptMode mode = AttemptMode::MultipleAttempts;
  bool pqc_enabled = true;
  bool repair_enabled = true;
  std::size_t max_tokens = 128;
  /// Examples in the prompt and available to checker and tester.
  bool use_examples = true;
  /// Records every expanded token sequence in the stats.
  bool trace_expansions = false;

  /// Throws Error(ConfigError) when a field is out of range.
  void validate() const;
};

struct SearchNode {
  std::string text;
  std::vector<TokenId> tokens;
  /// Natural log of the product of the path's token probabilities.
  double log_prob = 0;
  /// The last token is the end-of-sequence marker.
  bool ended = false;
  std::uint64_t id = 0;
  std::uint64_t parent_id = 0;

  double cum_prob() const { return std::exp(log_prob); }
  std::size_t depth() const { return tokens.size(); }
};

/// The empty query with probability 1.
SearchNode root_node();

/// Appends a candidate: text grows by its surface, probability multiplies by its prob.
SearchNode extend(const SearchNode& node, const TokenCandidate& candidate, TokenId eos);

/// Ended by the model and a complete seven-clause parse.
bool is_complete(const SearchNode& node);

/// Max-probability queue with dedup by token sequence. Ties pop the deeper node
/// first, then the lexicographically smaller token sequence.
class SearchQueue {
 public:
  /// False (and no change) when the token sequence was pushed before.
  bool push(SearchNode node);
  std::optional<SearchNode> pop_best();
  std::size_t size() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }

  /// True when `a` should pop before `b`.
  static bool pops_before(const SearchNode& a, const SearchNode& b);

 private:
  struct Later {
    bool operator()(const SearchNode& a, const SearchNode& b) const { return pops_before(b, a); }
  };
  struct SequenceHash {
    std::size_t operator()(const std::vector<TokenId>& tokens) const;
  };

  std::priority_queue<SearchNode, std::vector<SearchNode>, Later> heap_;
  std::unordered_set<std::vector<TokenId>, SequenceHash> seen_;
};

struct TestResult {
  bool accepted = false;
  /// Accepted query text, possibly a repair of the tested one.
  std::string query_text;
  bool repaired = false;
};

/// Tests complete queries; QTR is the production implementation.
class CompleteQueryTester {
 public:
  virtual ~CompleteQueryTester() = default;
  virtual TestResult test(const std::string& text, Clock::time_point deadline) = 0;
};

struct SearchStats {
  std::size_t nodes_expanded = 0;
  std::size_t candidates_generated = 0;
  std::size_t pruned_by_checker = 0;
  std::size_t complete_queries_tested = 0;
  /// Pops whose parent is not the previously popped node.
  std::size_t backtracks = 0;
  std::size_t duplicates = 0;
  std::size_t dropped_at_cap = 0;
  double elapsed_seconds = 0;
  std::vector<std::string> failed_queries;
  std::optional<std::string> adapter_error;
  std::vector<std::vector<TokenId>> expansions;
};

enum class SearchStatus { Solved, Exhausted, TimedOut, AdapterFailure };

std::string_view to_string(SearchStatus status);

struct SearchOutcome {
  SearchStatus status = SearchStatus::Exhausted;
  std::optional<std::string> query_text;
  std::optional<NormalizedQuery> query;
  bool repaired = false;
  SearchStats stats;
};

/// Best-first search over the model's top-k continuations. `checker` may be null;
/// it is consulted only when config.pqc_enabled is set.
SearchOutcome run_search(const std::string& task_text, const LanguageModel& model, const PartialQueryChecker* checker,
                         CompleteQueryTester& tester, const SearchConfig& config);

}  // namespace nsql
