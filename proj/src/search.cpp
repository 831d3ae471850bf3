#include "nsql/search.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "nsql/error.hpp"
#include "nsql/normalize.hpp"
#include "nsql/partial.hpp"

namespace nsql {

std::string_view to_string(AttemptMode mode) {
  return mode == AttemptMode::SingleAttempt ? "single" : "multiple";
}

std::string_view to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::Solved: return "Solved";
    case SearchStatus::Exhausted: return "Exhausted";
    case SearchStatus::TimedOut: return "TimedOut";
    case SearchStatus::AdapterFailure: return "AdapterFailure";
  }
  return "";
}

void SearchConfig::validate() const {
  if (k < 1) throw Error(Errc::ConfigError, "k must be at least 1");
  if (!(time_limit_s > 0)) throw Error(Errc::ConfigError, "time limit must be positive");
  if (max_tokens < 1) throw Error(Errc::ConfigError, "max_tokens must be at least 1");
}

SearchNode root_node() { return SearchNode{}; }

SearchNode extend(const SearchNode& node, const TokenCandidate& candidate, TokenId eos) {
  SearchNode child;
  child.text = node.text + candidate.surface;
  child.tokens = node.tokens;
  child.tokens.push_back(candidate.token_id);
  child.log_prob = node.log_prob + std::log(candidate.prob);
  child.ended = candidate.token_id == eos;
  child.parent_id = node.id;
  return child;
}

bool is_complete(const SearchNode& node) {
  if (!node.ended) return false;
  try {
    return parse_partial(node.text, true).is_complete;
  } catch (const Error&) {
    return false;
  }
}

bool SearchQueue::pops_before(const SearchNode& a, const SearchNode& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  if (a.depth() != b.depth()) return a.depth() > b.depth();
  return std::lexicographical_compare(a.tokens.begin(), a.tokens.end(), b.tokens.begin(), b.tokens.end());
}

std::size_t SearchQueue::SequenceHash::operator()(const std::vector<TokenId>& tokens) const {
  std::size_t h = 1469598103934665603ull;
  for (TokenId t : tokens) {
    h ^= t;
    h *= 1099511628211ull;
  }
  return h;
}

bool SearchQueue::push(SearchNode node) {
  if (!seen_.insert(node.tokens).second) return false;
  heap_.push(std::move(node));
  return true;
}

std::optional<SearchNode> SearchQueue::pop_best() {
  if (heap_.empty()) return std::nullopt;
  SearchNode node = heap_.top();
  heap_.pop();
  return node;
}

SearchOutcome run_search(const std::string& task_text, const LanguageModel& model, const PartialQueryChecker* checker,
                         CompleteQueryTester& tester, const SearchConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const auto deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(config.time_limit_s));
  SearchOutcome outcome;
  auto& stats = outcome.stats;
  auto finish = [&](SearchStatus status) {
    outcome.status = status;
    stats.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return outcome;
  };
  const bool filter = config.pqc_enabled && checker;

  GenerationSession session;
  try {
    session = model.start_session(task_text);
  } catch (const Error& e) {
    stats.adapter_error = e.what();
    return finish(SearchStatus::AdapterFailure);
  }

  SearchQueue queue;
  std::uint64_t next_id = 1;
  SearchNode root = root_node();
  root.id = next_id++;
  queue.push(std::move(root));
  std::uint64_t last_popped = 0;

  while (true) {
    if (Clock::now() >= deadline) return finish(SearchStatus::TimedOut);
    auto popped = queue.pop_best();
    if (!popped) return finish(SearchStatus::Exhausted);
    SearchNode node = std::move(*popped);
    if (last_popped != 0 && node.parent_id != last_popped) ++stats.backtracks;
    last_popped = node.id;

    if (node.ended) {
      if (!is_complete(node)) continue;
      ++stats.complete_queries_tested;
      TestResult result = tester.test(node.text, deadline);
      if (result.accepted) {
        outcome.query_text = result.query_text;
        outcome.repaired = result.repaired;
        try {
          outcome.query = parse_normalized(result.query_text);
        } catch (const Error&) {
        }
        return finish(SearchStatus::Solved);
      }
      stats.failed_queries.push_back(node.text);
      if (config.mode == AttemptMode::SingleAttempt) return finish(SearchStatus::Exhausted);
      continue;
    }
    if (node.depth() >= config.max_tokens) {
      ++stats.dropped_at_cap;
      continue;
    }

    ++stats.nodes_expanded;
    if (config.trace_expansions) stats.expansions.push_back(node.tokens);
    session.prefix = node.tokens;
    std::vector<TokenCandidate> candidates;
    try {
      candidates = model.top_candidates(session, config.k);
    } catch (const Error& e) {
      stats.adapter_error = e.what();
      return finish(SearchStatus::AdapterFailure);
    }
    stats.candidates_generated += candidates.size();
    for (const auto& candidate : candidates) {
      if (!(candidate.prob > 0)) continue;
      SearchNode child = extend(node, candidate, model.eos_token());
      if (filter && !checker->check(child.text, child.ended).pass) {
        ++stats.pruned_by_checker;
        continue;
      }
      child.id = next_id++;
      if (!queue.push(std::move(child))) ++stats.duplicates;
    }
  }
}

}  // namespace nsql
