#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library under test except the ChoiceSource interface it plugs into.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "matchcert/sampling.hpp"

namespace oracle {

/// Binomial coefficient by Pascal's rule, exact for n <= 62.
inline std::uint64_t choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  static std::vector<std::vector<std::uint64_t>> rows;
  while (static_cast<std::int64_t>(rows.size()) <= n) {
    const std::size_t r = rows.size();
    std::vector<std::uint64_t> row(r + 1, 1);
    for (std::size_t j = 1; j < r; ++j) row[j] = rows[r - 1][j - 1] + rows[r - 1][j];
    rows.push_back(std::move(row));
  }
  return rows[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

/// Integer numerator over the common denominator C(n, s).
inline std::uint64_t pmf_numerator(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k) {
  return choose(m, k) * choose(n - m, s - k);
}

inline long double pmf(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k) {
  return static_cast<long double>(pmf_numerator(m, n, s, k)) / static_cast<long double>(choose(n, s));
}

/// Exact tail numerators over the common denominator C(n, s).
inline std::uint64_t tail_upper_numerator(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k) {
  std::uint64_t num = 0;
  for (std::int64_t j = k; j <= s; ++j) num += pmf_numerator(m, n, s, j);
  return num;
}

inline std::uint64_t tail_lower_numerator(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k) {
  std::uint64_t num = 0;
  for (std::int64_t j = 0; j <= k; ++j) num += pmf_numerator(m, n, s, j);
  return num;
}

/// P(K >= k).
inline long double tail_upper(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k) {
  return static_cast<long double>(tail_upper_numerator(m, n, s, k)) / static_cast<long double>(choose(n, s));
}

/// P(K <= k).
inline long double tail_lower(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k) {
  return static_cast<long double>(tail_lower_numerator(m, n, s, k)) / static_cast<long double>(choose(n, s));
}

/// A confidence level given exactly as a fraction.
struct Fraction {
  std::uint64_t num;
  std::uint64_t den;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// tail / C(n, s) >= delta, compared exactly.
inline bool at_least(std::uint64_t tail, std::int64_t n, std::int64_t s, Fraction delta) {
  using wide = unsigned __int128;
  return static_cast<wide>(tail) * delta.den >= static_cast<wide>(delta.num) * choose(n, s);
}

/// Smallest m with P(K >= k | m) >= delta, over n, by linear scan.
inline double invert_lower(std::int64_t n, std::int64_t s, std::int64_t k, Fraction delta) {
  for (std::int64_t m = 0; m <= n; ++m) {
    if (at_least(tail_upper_numerator(m, n, s, k), n, s, delta)) return static_cast<double>(m) / n;
  }
  return 1.0;
}

/// Largest m with P(K <= k | m) >= delta, over n, by linear scan.
inline double invert_upper(std::int64_t n, std::int64_t s, std::int64_t k, Fraction delta) {
  for (std::int64_t m = n; m >= 0; --m) {
    if (at_least(tail_lower_numerator(m, n, s, k), n, s, delta)) return static_cast<double>(m) / n;
  }
  return 0.0;
}

/// sqrt of the pairwise double sum (x_i - x_j)^2 / (2 s^2).
inline double pairwise_sigma(const std::vector<double>& xs) {
  long double acc = 0;
  for (double a : xs) {
    for (double b : xs) acc += static_cast<long double>(a - b) * (a - b);
  }
  const long double s = static_cast<long double>(xs.size());
  return static_cast<double>(std::sqrt(acc / (2 * s * s)));
}

inline double hoeffding_slack(double range, std::size_t s, double delta) {
  return range * static_cast<double>(std::sqrt(std::log(1.0L / delta) / (2.0L * s)));
}

inline long double ebs_kappa() { return 7.0L / 3.0L + 3.0L / std::sqrt(2.0L); }

/// Walks every branch of a randomized procedure. Each run replays a fixed
/// prefix of choices and takes the first option at new choice points; the
/// probability of the run is the product of the branch probabilities.
class EnumeratingChoices final : public matchcert::ChoiceSource {
 public:
  /// Calls `run` once per complete branch with the branch probability
  /// available through probability().
  void enumerate(const std::function<void()>& run) {
    path_.clear();
    while (true) {
      depth_ = 0;
      probability_ = 1.0L;
      run();
      while (!path_.empty() && path_.back().index + 1 == path_.back().count) path_.pop_back();
      if (path_.empty()) return;
      ++path_.back().index;
    }
  }

  long double probability() const { return probability_; }

  std::vector<std::size_t> subset(std::size_t n, std::size_t k) override {
    const auto count = choose(static_cast<std::int64_t>(n), static_cast<std::int64_t>(k));
    const std::size_t index = branch(count);
    probability_ /= static_cast<long double>(count);
    return unrank(n, k, index);
  }

  std::int64_t hypergeometric(std::int64_t population, std::int64_t successes,
                              std::int64_t draws) override {
    const std::int64_t lo = std::max<std::int64_t>(0, draws - (population - successes));
    const std::int64_t hi = std::min(draws, successes);
    const std::size_t index = branch(static_cast<std::size_t>(hi - lo + 1));
    const std::int64_t i = lo + static_cast<std::int64_t>(index);
    probability_ *= pmf(successes, population, draws, i);
    return i;
  }

 private:
  struct Step {
    std::size_t index;
    std::size_t count;
  };

  std::size_t branch(std::size_t count) {
    if (depth_ < path_.size()) return path_[depth_++].index;
    path_.push_back({0, count});
    ++depth_;
    return 0;
  }

  // index-th k-subset of [0, n) in lexicographic order.
  static std::vector<std::size_t> unrank(std::size_t n, std::size_t k, std::size_t index) {
    std::vector<std::size_t> out;
    std::size_t next = 0;
    for (std::size_t slot = 0; slot < k; ++slot) {
      while (true) {
        const auto with = choose(static_cast<std::int64_t>(n - next - 1),
                                 static_cast<std::int64_t>(k - slot - 1));
        if (index < with) break;
        index -= with;
        ++next;
      }
      out.push_back(next++);
    }
    return out;
  }

  std::vector<Step> path_;
  std::size_t depth_ = 0;
  long double probability_ = 1.0L;
};

}  // namespace oracle
