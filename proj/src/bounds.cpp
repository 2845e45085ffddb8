#include "matchcert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "matchcert/error.hpp"

namespace matchcert {

namespace {

// Relative slack accepted when comparing a computed tail with delta. It only
// ever moves the inverted bound outward, so rounding in the log-space sums
// cannot produce an anti-conservative count.
constexpr double kTailTolerance = 1e-10;

double log_factorial(std::int64_t k) {
  thread_local std::vector<double> table{0.0};
  if (k < 0) throw Error("invalid-hypergeom-params", "negative factorial argument");
  const auto index = static_cast<std::size_t>(k);
  if (index >= table.size()) {
    const std::size_t old = table.size();
    table.resize(std::max(index + 1, old * 2));
    for (std::size_t i = old; i < table.size(); ++i) {
      table[i] = std::lgamma(static_cast<double>(i) + 1.0);
    }
  }
  return table[index];
}

double log_choose(std::int64_t n, std::int64_t k) {
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

void check_hypergeom(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k) {
  if (n < 0 || m < 0 || m > n || s < 0 || s > n || k < 0 || k > s) {
    throw Error("invalid-hypergeom-params",
                "m=" + std::to_string(m) + " n=" + std::to_string(n) +
                    " s=" + std::to_string(s) + " k=" + std::to_string(k));
  }
}

// Support of K: [max(0, s - (n - m)), min(s, m)].
std::int64_t support_min(std::int64_t m, std::int64_t n, std::int64_t s) {
  return std::max<std::int64_t>(0, s - (n - m));
}
std::int64_t support_max(std::int64_t m, std::int64_t s) { return std::min(s, m); }

// Streaming log-sum-exp of log pmf over j in [from, to].
double tail_sum(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t from,
                std::int64_t to) {
  if (from > to) return 0.0;
  double max_log = -std::numeric_limits<double>::infinity();
  double scaled = 0.0;
  for (std::int64_t j = from; j <= to; ++j) {
    const double term = hypergeom_log_pmf(m, n, s, j);
    if (term > max_log) {
      scaled = scaled * std::exp(max_log - term) + 1.0;
      max_log = term;
    } else {
      scaled += std::exp(term - max_log);
    }
  }
  return std::min(1.0, scaled * std::exp(max_log));
}

void check_sample(const PopulationSpec& pop, std::span<const double> values) {
  pop.validate();
  if (values.empty()) throw Error("empty-sample");
  if (static_cast<std::int64_t>(values.size()) > pop.n) {
    throw Error("invalid-sample-size", "sample larger than population");
  }
  for (double v : values) {
    if (!(v >= pop.lo && v <= pop.hi)) {
      throw Error("sample-out-of-range", "value " + std::to_string(v) + " outside [" +
                                             std::to_string(pop.lo) + ", " +
                                             std::to_string(pop.hi) + "]");
    }
  }
}

BoundResult symmetric_result(const PopulationSpec& pop, double estimate, double slack,
                             Confidence delta, BoundMethod method) {
  BoundResult out;
  out.estimate = estimate;
  out.lower = std::clamp(estimate - slack, pop.lo, pop.hi);
  out.upper = std::clamp(estimate + slack, pop.lo, pop.hi);
  out.delta_used = delta;
  out.method = method;
  out.diagnostics["slack"] = slack;
  return out;
}

}  // namespace

Confidence::Confidence(double delta) : delta_(delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error("invalid-delta", "delta must lie in (0,1), got " + std::to_string(delta));
  }
}

void PopulationSpec::validate() const {
  if (n < 1) throw Error("invalid-population", "population size must be positive");
  if (!(lo <= hi)) throw Error("invalid-population", "range lower end exceeds upper end");
}

std::string_view to_string(BoundMethod method) {
  switch (method) {
    case BoundMethod::hoeffding:
      return "hoeffding";
    case BoundMethod::empirical_bernstein_serfling:
      return "empirical-bernstein-serfling";
    case BoundMethod::hypergeometric_exact:
      return "hypergeometric-exact";
  }
  return "unknown";
}

BoundMethod parse_bound_method(std::string_view name) {
  if (name == "hoeffding") return BoundMethod::hoeffding;
  if (name == "empirical-bernstein-serfling" || name == "ebs") {
    return BoundMethod::empirical_bernstein_serfling;
  }
  if (name == "hypergeometric-exact" || name == "hypergeometric") {
    return BoundMethod::hypergeometric_exact;
  }
  throw Error("unknown-method", std::string(name));
}

DeltaBudget::DeltaBudget(std::vector<double> parts) : parts_(std::move(parts)) {
  for (double p : parts_) Confidence{p};
}

DeltaBudget DeltaBudget::equal_split(double total, std::size_t count) {
  if (count == 0) throw Error("invalid-delta", "cannot split over zero terms");
  return DeltaBudget(std::vector<double>(count, total / static_cast<double>(count)));
}

Confidence DeltaBudget::part(std::size_t index) const {
  if (index >= parts_.size()) {
    throw Error("budget-too-short", "budget has " + std::to_string(parts_.size()) +
                                        " parts, term " + std::to_string(index) + " requested");
  }
  return Confidence(parts_[index]);
}

double DeltaBudget::total() const { return std::accumulate(parts_.begin(), parts_.end(), 0.0); }

void DeltaBudget::validate() const {
  if (total() >= 1.0) throw Error("budget-exhausted", "delta parts sum to " + std::to_string(total()));
}

double union_confidence(const DeltaBudget& budget) {
  budget.validate();
  return 1.0 - budget.total();
}

double sample_mean(std::span<const double> values) {
  if (values.empty()) throw Error("empty-sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sigma_hat(std::span<const double> values) {
  const double mean = sample_mean(values);
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / static_cast<double>(values.size()));
}

double rho_s(std::int64_t n, std::int64_t s) {
  if (s < 1 || s > n) {
    throw Error("invalid-sample-size", "s=" + std::to_string(s) + " n=" + std::to_string(n));
  }
  const double nd = static_cast<double>(n);
  const double sd = static_cast<double>(s);
  if (2 * s <= n) return 1.0 - (sd - 1.0) / nd;
  return (1.0 - sd / nd) * (1.0 + 1.0 / nd);
}

double ebs_kappa() { return 7.0 / 3.0 + 3.0 / std::sqrt(2.0); }

BoundResult hoeffding_bounds(const PopulationSpec& pop, std::span<const double> values,
                             Confidence delta) {
  check_sample(pop, values);
  const double s = static_cast<double>(values.size());
  const double slack = (pop.hi - pop.lo) * std::sqrt(std::log(1.0 / delta.delta()) / (2.0 * s));
  return symmetric_result(pop, sample_mean(values), slack, delta, BoundMethod::hoeffding);
}

BoundResult ebs_bounds(const PopulationSpec& pop, std::span<const double> values,
                       Confidence delta) {
  check_sample(pop, values);
  const auto s = static_cast<std::int64_t>(values.size());
  const double sd = static_cast<double>(s);
  const double log_term = std::log(5.0 / delta.delta());
  const double sigma = sample_sigma_hat(values);
  const double rho = rho_s(pop.n, s);
  const double variance_slack = sigma * std::sqrt(2.0 * rho * log_term / sd);
  const double range_slack = ebs_kappa() * (pop.hi - pop.lo) * log_term / sd;
  auto out = symmetric_result(pop, sample_mean(values), variance_slack + range_slack, delta,
                              BoundMethod::empirical_bernstein_serfling);
  out.diagnostics["sigma_hat"] = sigma;
  out.diagnostics["rho_s"] = rho;
  out.diagnostics["variance_slack"] = variance_slack;
  out.diagnostics["range_slack"] = range_slack;
  return out;
}

double hypergeom_log_pmf(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k) {
  check_hypergeom(m, n, s, k);
  if (k > m || s - k > n - m) return -std::numeric_limits<double>::infinity();
  return log_choose(m, k) + log_choose(n - m, s - k) - log_choose(n, s);
}

double hypergeom_pmf(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k) {
  const double lp = hypergeom_log_pmf(m, n, s, k);
  return std::isinf(lp) ? 0.0 : std::exp(lp);
}

double hypergeom_tail_upper(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k) {
  check_hypergeom(m, n, s, k);
  const std::int64_t lo = support_min(m, n, s);
  const std::int64_t hi = support_max(m, s);
  if (k <= lo) return 1.0;
  return tail_sum(m, n, s, k, hi);
}

double hypergeom_tail_lower(std::int64_t m, std::int64_t n, std::int64_t s, std::int64_t k) {
  check_hypergeom(m, n, s, k);
  const std::int64_t lo = support_min(m, n, s);
  const std::int64_t hi = support_max(m, s);
  if (k >= hi) return 1.0;
  return tail_sum(m, n, s, lo, k);
}

double hypergeom_invert_lower(std::int64_t n, std::int64_t s, std::int64_t k, Confidence delta) {
  check_hypergeom(0, n, s, k);
  if (k == 0) return 0.0;
  const double target = delta.delta() * (1.0 - kTailTolerance);
  // H+ is nondecreasing in m; at m = n - s + k it equals 1.
  std::int64_t lo = k;
  std::int64_t hi = n - s + k;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (hypergeom_tail_upper(mid, n, s, k) >= target) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return static_cast<double>(lo) / static_cast<double>(n);
}

double hypergeom_invert_upper(std::int64_t n, std::int64_t s, std::int64_t k, Confidence delta) {
  check_hypergeom(0, n, s, k);
  if (k == s) return 1.0;
  const double target = delta.delta() * (1.0 - kTailTolerance);
  // H- is nonincreasing in m; at m = k it equals 1.
  std::int64_t lo = k;
  std::int64_t hi = n - s + k;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo + 1) / 2;
    if (hypergeom_tail_lower(mid, n, s, k) >= target) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return static_cast<double>(lo) / static_cast<double>(n);
}

bool is_binary(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

BoundResult hypergeometric_bounds(const PopulationSpec& pop, std::span<const double> values,
                                  Confidence delta) {
  check_sample(pop, values);
  if (pop.lo != 0.0 || pop.hi != 1.0 || !is_binary(values)) {
    throw Error("method-requires-binary", "hypergeometric-exact needs 0/1 values on [0,1]");
  }
  const auto s = static_cast<std::int64_t>(values.size());
  const auto k = static_cast<std::int64_t>(std::count(values.begin(), values.end(), 1.0));
  BoundResult out;
  out.estimate = static_cast<double>(k) / static_cast<double>(s);
  out.lower = hypergeom_invert_lower(pop.n, s, k, delta);
  out.upper = hypergeom_invert_upper(pop.n, s, k, delta);
  out.delta_used = delta;
  out.method = BoundMethod::hypergeometric_exact;
  out.diagnostics["successes"] = static_cast<double>(k);
  out.diagnostics["lower_count"] = out.lower * static_cast<double>(pop.n);
  out.diagnostics["upper_count"] = out.upper * static_cast<double>(pop.n);
  return out;
}

BoundResult bound_mean(const PopulationSpec& pop, std::span<const double> values,
                       BoundMethod method, Confidence delta, Side side) {
  BoundResult out;
  switch (method) {
    case BoundMethod::hoeffding:
      out = hoeffding_bounds(pop, values, delta);
      break;
    case BoundMethod::empirical_bernstein_serfling:
      out = ebs_bounds(pop, values, delta);
      break;
    case BoundMethod::hypergeometric_exact:
      out = hypergeometric_bounds(pop, values, delta);
      break;
  }
  if (side == Side::lower) out.upper = pop.hi;
  if (side == Side::upper) out.lower = pop.lo;
  return out;
}

}  // namespace matchcert
