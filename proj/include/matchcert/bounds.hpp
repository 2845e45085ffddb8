#pragma once

// PAC bounds on the mean of a bounded function over a finite population,
// estimated from a sample drawn uniformly at random without replacement.
//
// Three families are provided:
//   - Hoeffding (valid without replacement, needs only the range),
//   - empirical Bernstein-Serfling (uses the sample spread and the sampling
//     fraction, so it tightens when the variance is small),
//   - exact hypergeometric tail inversion for 0/1-valued functions.
//
// Every bound is one-sided at the confidence it is given; a two-sided result
// carries two one-sided bounds each holding with probability 1 - delta.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace matchcert {

/// Bound failure probability, strictly inside (0, 1).
class Confidence {
 public:
  explicit Confidence(double delta);
  double delta() const { return delta_; }

 private:
  double delta_;
};

/// Size of the finite population and the range [lo, hi] of the function.
struct PopulationSpec {
  std::int64_t n = 1;
  double lo = 0.0;
  double hi = 1.0;

  void validate() const;
};

enum class BoundMethod { hoeffding, empirical_bernstein_serfling, hypergeometric_exact };
enum class Side { lower, upper, both };

std::string_view to_string(BoundMethod method);
BoundMethod parse_bound_method(std::string_view name);

struct BoundResult {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 1.0;
  Confidence delta_used{0.05};
  BoundMethod method = BoundMethod::hoeffding;
  std::map<std::string, double> diagnostics;
};

/// Failure probabilities of the individual terms of a union bound. Parts are
/// never split automatically; callers pass exactly what each term gets.
class DeltaBudget {
 public:
  DeltaBudget() = default;
  explicit DeltaBudget(std::vector<double> parts);

  /// `count` equal parts summing to `total`.
  static DeltaBudget equal_split(double total, std::size_t count);

  const std::vector<double>& parts() const { return parts_; }
  std::size_t size() const { return parts_.size(); }
  Confidence part(std::size_t index) const;
  double total() const;

  /// Throws "budget-exhausted" when the parts sum to 1 or more.
  void validate() const;

 private:
  std::vector<double> parts_;
};

/// Joint confidence 1 - sum(parts) of simultaneous bounds.
double union_confidence(const DeltaBudget& budget);

double sample_mean(std::span<const double> values);

/// Sample standard deviation with the 1/s normalisation, i.e. the square root
/// of sum_{i,j} (x_i - x_j)^2 / (2 s^2).
double sample_sigma_hat(std::span<const double> values);

/// Finite-population correction used by the Bernstein-Serfling bound.
double rho_s(std::int64_t n, std::int64_t s);

/// kappa = 7/3 + 3/sqrt(2).
double ebs_kappa();

BoundResult hoeffding_bounds(const PopulationSpec& pop, std::span<const double> values,
                             Confidence delta);
BoundResult ebs_bounds(const PopulationSpec& pop, std::span<const double> values,
                       Confidence delta);
BoundResult hypergeometric_bounds(const PopulationSpec& pop, std::span<const double> values,
                                  Confidence delta);

// Hypergeometric law of the number of successes k in s draws without
// replacement from n items of which m are successes.
double hypergeom_log_pmf(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k);
double hypergeom_pmf(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k);
/// P(K >= k).
double hypergeom_tail_upper(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k);
/// P(K <= k).
double hypergeom_tail_lower(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k);

/// min{m : P(K >= k | m) >= delta} / n.
double hypergeom_invert_lower(std::int64_t n, std::int64_t s, std::int64_t k, Confidence delta);
/// max{m : P(K <= k | m) >= delta} / n.
double hypergeom_invert_upper(std::int64_t n, std::int64_t s, std::int64_t k, Confidence delta);

/// True when every value is exactly 0 or 1.
bool is_binary(std::span<const double> values);

/// Dispatches to the requested family. Sides that are not requested are
/// reported as the trivial range end (lo for lower, hi for upper).
BoundResult bound_mean(const PopulationSpec& pop, std::span<const double> values,
                       BoundMethod method, Confidence delta, Side side = Side::both);

}  // namespace matchcert
