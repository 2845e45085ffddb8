#pragma once

// Precision, recall and error-rate certificates for query matchers, which
// return M(x) for one node at a time and cannot afford to enumerate X.
//
// S_X  - uniform sample of X whose actual matches are known,
// S'_X - independent uniform sample of X; only identified matches are
//        needed there, actual matches are never read.
// Population sizes of the node subsets (nodes with identified matches, nodes
// with actual matches) are unknown for query matchers; |X| stands in for
// them as an upper bound.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "matchcert/bounds.hpp"
#include "matchcert/graph.hpp"
#include "matchcert/matchers.hpp"
#include "matchcert/report.hpp"
#include "matchcert/sampling.hpp"

namespace matchcert {

/// Source of actual matches M(x).
class GroundTruth {
 public:
  virtual ~GroundTruth() = default;
  virtual PerNodeView actual(NodeIndex x) = 0;
};

class MatchSetTruth final : public GroundTruth {
 public:
  explicit MatchSetTruth(const MatchSet& actual) : actual_(actual) {}
  PerNodeView actual(NodeIndex x) override { return actual_.view(x); }

 private:
  const MatchSet& actual_;
};

struct QueryValidationInput {
  const NetworkPair* pair = nullptr;
  QueryMatcher* holdout = nullptr;
  QueryMatcher* complete = nullptr;  // optional
  /// Set when the complete matcher is known to coincide with the holdout
  /// one (e.g. equivalent handles). Disagreement is then exactly zero and
  /// every complete certificate equals its holdout counterpart.
  bool complete_identical = false;
  std::vector<NodeIndex> s_x;
  std::vector<NodeIndex> s_x_prime;
  GroundTruth* truth = nullptr;  // consulted for s_x only
  std::size_t k_cap = 1;         // max identified matches per node
  BoundMethod method = BoundMethod::hoeffding;
  DeltaBudget budget;
};

// Single-node quantities. std::nullopt means undefined.
std::optional<double> single_node_precision(const PerNodeView& identified, const PerNodeView& actual);
std::optional<double> single_node_recall(const PerNodeView& identified, const PerNodeView& actual);
/// 1 iff the identified and actual sets differ.
int single_node_error(const PerNodeView& identified, const PerNodeView& actual);
/// d_r(x) = 1{M_H(x) \ M(x) nonempty}.
int recall_disagreement(const PerNodeView& holdout, const PerNodeView& complete);
/// d_p(x): 1 + |M_H(x) \ M(x)| / |M(x)| when both are nonempty and differ,
/// 1 when only the holdout set is nonempty, 0 otherwise.
double precision_disagreement(const PerNodeView& holdout, const PerNodeView& complete);

struct PerNodeStats {
  NodeIndex node = 0;
  bool validation_sample = true;  // false for S'_X
  std::optional<double> p;        // holdout single-node precision
  std::optional<double> r;        // holdout single-node recall
  std::optional<int> w;           // holdout single-node error
  std::optional<int> d_r;
  std::optional<double> d_p;
};

/// Holdout precision and recall. Budget: [delta_precision, delta_recall].
std::pair<ValidationReport, ValidationReport> holdout_query_bounds(const QueryValidationInput& in);

/// Budget: [delta_holdout_recall, delta_disagreement, delta_actual_fraction].
ValidationReport complete_query_recall(const QueryValidationInput& in);

/// Budget: [delta_holdout_fraction, delta_holdout_precision, delta_disagreement,
///          delta_complete_fraction].
ValidationReport complete_query_precision(const QueryValidationInput& in);

/// Upper bound on the mean single-node error. Holdout budget: [delta];
/// complete budget: [delta_holdout_error, delta_disagreement].
ValidationReport holdout_error_rate(const QueryValidationInput& in);
ValidationReport complete_error_rate(const QueryValidationInput& in);

std::vector<PerNodeStats> compute_node_stats(const QueryValidationInput& in);
nlohmann::json to_json(const PerNodeStats& stats, const NetworkPair& pair);

/// Keeps drawing from `sampler` until `target` drawn items satisfy
/// `in_subset` or the population runs out; returns everything drawn.
std::vector<NodeIndex> draw_until(SequentialSampler<NodeIndex>& sampler,
                                  const std::function<bool(NodeIndex)>& in_subset,
                                  std::size_t target);

struct QueryMetrics {
  std::optional<double> precision;   // mean p(x) over nodes with identified matches
  std::optional<double> recall;      // mean r(x) over nodes with actual matches
  double error_rate = 0.0;           // mean w(x) over X
};

/// Exact query metrics by enumerating X (test and harness oracle).
QueryMetrics true_query_metrics(const MatchSet& identified, const MatchSet& actual);

}  // namespace matchcert
