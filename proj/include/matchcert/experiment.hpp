#pragma once

// Monte Carlo coverage sweeps: every trial generates a network pair with
// known ground truth, draws validation samples, runs a holdout and a
// complete matcher, computes each certificate and compares it to the true
// metric. A certificate fails on a trial when a lower bound exceeds the true
// value (or an upper bound falls below it).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchcert/bounds.hpp"
#include "matchcert/matchers.hpp"
#include "matchcert/synth.hpp"

namespace matchcert {

struct SampleSizes {
  std::size_t s_m = 200;        // verified matches for validation
  std::size_t s_x = 200;        // nodes with known actual matches
  std::size_t s_x_prime = 200;  // independent nodes for disagreement terms
  std::size_t t = 100;          // verified matches used to train the holdout matcher

  bool operator==(const SampleSizes&) const = default;
};

struct ExperimentConfig {
  GeneratorConfig generator;
  MatcherConfig matcher_holdout;
  /// When absent the complete matcher reuses the holdout configuration.
  /// Either way it is seeded with the training and validation pairs.
  std::optional<MatcherConfig> matcher_complete;
  SampleSizes sample_sizes;
  std::vector<BoundMethod> methods{BoundMethod::hoeffding, BoundMethod::empirical_bernstein_serfling,
                                   BoundMethod::hypergeometric_exact};
  /// Failure probability of every certificate, split equally among its terms.
  double delta = 0.05;
  /// Subset of certificate_names(); empty means all.
  std::vector<std::string> theorems;
  std::size_t trials = 500;
  std::uint64_t seed = 1;
  std::string output_path;  // CSV path; the JSON table goes next to it

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Certificate names in evaluation order (the report theorem names).
const std::vector<std::string>& certificate_names();
/// Number of budget parts a certificate consumes.
std::size_t certificate_terms(const std::string& name);

struct TrialOutcome {
  std::string theorem;
  BoundMethod method = BoundMethod::hoeffding;
  bool evaluated = false;  // false when the trial gave no usable sample
  double bound = 0.0;
  double truth = 0.0;
  bool failed = false;
};

/// One trial; the random stream depends only on (cfg.seed, trial).
std::vector<TrialOutcome> run_trial(const ExperimentConfig& cfg, std::size_t trial);

struct CoverageRow {
  std::string theorem;
  std::string method;
  DeltaBudget budget;
  std::size_t trials = 0;
  std::size_t evaluated = 0;
  std::size_t failures = 0;
  double mean_bound = 0.0;
  double mean_truth = 0.0;

  double failure_rate() const;
  /// sum(delta) + 3 binomial standard deviations at `evaluated` trials.
  double tolerance() const;
};

struct CoverageTable {
  nlohmann::json config;
  std::vector<CoverageRow> rows;  // sorted by (theorem, method, budget)

  /// Columns: theorem,method,delta_parts,trials,evaluated,skipped,failures,
  /// failure_rate,delta_total,tolerance,within_tolerance,mean_bound,mean_truth
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Runs cfg.trials trials on up to `jobs` threads. Output does not depend
/// on `jobs`. A trial error aborts the sweep with the trial index attached.
CoverageTable run_coverage(const ExperimentConfig& cfg, std::size_t jobs = 1);

}  // namespace matchcert
