#pragma once

// Precision and recall certificates for batch matchers, whose identified
// matches are fully materialised before validation.
//
// Validation data:
//   S_M - verified matches drawn uniformly without replacement from M,
//   S_X - nodes drawn uniformly without replacement from X whose actual
//         matches are known (only m(x) is used).
// The holdout match set was built without these samples; the complete match
// set may have used them.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "matchcert/bounds.hpp"
#include "matchcert/graph.hpp"
#include "matchcert/matchers.hpp"
#include "matchcert/report.hpp"

namespace matchcert {

/// Size of a population that is either known exactly or only bounded above.
struct PopulationSize {
  std::int64_t n = 0;
  bool exact = true;
};

struct BatchValidationInput {
  const NetworkPair* pair = nullptr;
  const MatchSet* m_hat_holdout = nullptr;
  const MatchSet* m_hat_complete = nullptr;  // optional
  std::vector<NodePair> s_m;
  std::vector<NodeIndex> s_x;
  const MatchSet* s_x_actual = nullptr;      // actual matches, read only for s_x
  /// |M|. When absent the recall term uses an unbounded population, which
  /// keeps the Bernstein-Serfling factor conservative.
  std::optional<PopulationSize> m_size;
  std::size_t k_y = 1;
  BoundMethod method = BoundMethod::hoeffding;
  DeltaBudget budget;
  /// The density bound in the complete-recall denominator must exceed this.
  double denominator_floor = 0.0;
};

/// R_H >= p-(M, S_M, 1{M_H}, 0, 1, delta). Budget: [delta_r].
ValidationReport holdout_batch_recall(const BatchValidationInput& in);

/// P_H >= |X| / |M_H| * p-(recall) * p-(X, S_X, m, 0, k_y).
/// Budget: [delta_r, delta_p].
ValidationReport holdout_batch_precision(const BatchValidationInput& in);

/// R >= p-(recall) - |M_H \ M| / (|X| * p-(X, S_X, m, 0, k_y)).
/// Budget: [delta_1, delta_2].
ValidationReport complete_batch_recall(const BatchValidationInput& in);

/// P >= |X| / |M| * p-(recall) * p-(density) - |M_H \ M| / |M|.
/// Budget: [delta_1, delta_2].
ValidationReport complete_batch_precision(const BatchValidationInput& in);

struct BatchMetrics {
  std::optional<double> precision;  // undefined for an empty identified set
  std::optional<double> recall;     // undefined for an empty actual set
};

/// Exact precision and recall by set arithmetic (needs full ground truth).
BatchMetrics true_batch_metrics(const MatchSet& m_hat, const MatchSet& m_true);

/// Splits scored matches into consecutive score bands
/// [-inf, t0), [t0, t1), ..., [t_last, +inf); thresholds must be ascending.
std::vector<MatchSet> partition_by_score(const ScoredMatches& scored,
                                         std::span<const double> thresholds);

/// Holdout recall certificate for each band, held simultaneously; band i
/// uses budget part i.
SimultaneousReport simultaneous_batch_recall(const BatchValidationInput& in,
                                             std::span<const MatchSet> bands);

}  // namespace matchcert
