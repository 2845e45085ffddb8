#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "matchcert/graph.hpp"

namespace matchcert {

enum class MatcherKind { attribute_exact, percolation };

using IdPair = std::pair<std::string, std::string>;

struct SeedRule {
  enum class Kind { none, top_degree, verified_sample, explicit_pairs };
  Kind kind = Kind::verified_sample;
  std::size_t top_k = 0;             // top_degree
  std::vector<IdPair> pairs;         // explicit_pairs

  bool operator==(const SeedRule&) const = default;
};

struct MatcherConfig {
  MatcherKind kind = MatcherKind::percolation;
  std::string attr_key;              // attribute_exact
  SeedRule seeds;
  std::size_t threshold = 2;         // matched neighbours needed to accept a pair
  std::size_t max_iters = 100;

  void validate() const;
  bool operator==(const MatcherConfig&) const = default;
};

// Names of the validation samples; a holdout matcher may not list them.
inline constexpr const char* kSampleMatches = "S_M";
inline constexpr const char* kSampleNodes = "S_X";

/// A configured matcher plus the verified pairs it was allowed to see.
/// Matchers are pure functions of (handle, network pair).
class MatcherHandle {
 public:
  /// Throws "holdout-saw-validation" when trained_on names a validation sample.
  static MatcherHandle holdout(MatcherConfig config, std::vector<IdPair> training_seeds = {},
                               std::vector<std::string> trained_on = {"training"});

  /// Same matcher with the validation pairs added to its verified seeds.
  MatcherHandle complete_with(std::vector<IdPair> validation_seeds,
                              std::vector<std::string> validation_samples = {kSampleMatches,
                                                                             kSampleNodes}) const;

  const MatcherConfig& config() const { return config_; }
  const std::vector<IdPair>& verified_seeds() const { return verified_seeds_; }
  const std::vector<std::string>& trained_on() const { return trained_on_; }
  bool is_holdout() const { return holdout_; }

  /// True when both handles must produce identical output on any pair.
  bool equivalent(const MatcherHandle& other) const;

 private:
  MatcherHandle() = default;

  MatcherConfig config_;
  std::vector<IdPair> verified_seeds_;  // sorted, unique
  std::vector<std::string> trained_on_;
  bool holdout_ = true;
};

struct ScoredMatches {
  MatchSet matches;
  /// Per pair in (x, y) order: matched-neighbour count at acceptance, or
  /// kSeedScore for verified seeds.
  std::vector<std::pair<NodePair, double>> scores;
};

inline constexpr double kSeedScore = 1e9;

MatchSet run_batch(const MatcherHandle& handle, const NetworkPair& pair);
ScoredMatches run_batch_scored(const MatcherHandle& handle, const NetworkPair& pair);

/// One percolation round: adds every (x, y) with x and y both unmatched whose
/// matched-neighbour count reaches `threshold`. Conflicts are resolved
/// greedily by highest count, then lexicographic (x id, y id). Never removes pairs.
MatchSet percolate_step(const MatchSet& current, const NetworkPair& pair, std::size_t threshold);

/// Resolves the seed rule of a handle into pairs on `pair`.
MatchSet resolve_seeds(const MatcherHandle& handle, const NetworkPair& pair);

/// Matcher answering per-node requests. Implementations count queries.
class QueryMatcher {
 public:
  virtual ~QueryMatcher() = default;
  virtual PerNodeView query(NodeIndex x) = 0;
  virtual std::size_t query_count() const = 0;
};

/// Query front end for the baseline matchers. The underlying batch result is
/// computed once on first use; concurrent queries are safe.
class BaselineQueryMatcher final : public QueryMatcher {
 public:
  BaselineQueryMatcher(MatcherHandle handle, const NetworkPair& pair);

  PerNodeView query(NodeIndex x) override;
  std::size_t query_count() const override { return queries_.load(); }
  const MatcherHandle& handle() const { return handle_; }

 private:
  MatcherHandle handle_;
  const NetworkPair& pair_;
  std::once_flag once_;
  std::optional<MatchSet> result_;
  std::atomic<std::size_t> queries_{0};
};

PerNodeView run_query(const MatcherHandle& handle, const NetworkPair& pair, NodeIndex x);

}  // namespace matchcert
