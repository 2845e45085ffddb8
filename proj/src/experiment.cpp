#include "matchcert/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>
#include <tuple>

#include "matchcert/batch_validation.hpp"
#include "matchcert/config.hpp"
#include "matchcert/error.hpp"
#include "matchcert/query_validation.hpp"
#include "matchcert/rng.hpp"
#include "matchcert/sampling.hpp"

namespace matchcert {

namespace {

const std::vector<std::pair<std::string, std::size_t>>& certificate_table() {
  static const std::vector<std::pair<std::string, std::size_t>> table = {
      {"holdout-batch-recall", 1},     {"holdout-batch-precision", 2},
      {"complete-batch-recall", 2},    {"complete-batch-precision", 2},
      {"holdout-query-precision", 1},  {"holdout-query-recall", 1},
      {"complete-query-recall", 3},    {"complete-query-precision", 4},
      {"holdout-error-rate", 1},       {"complete-error-rate", 2},
  };
  return table;
}

bool is_upper(const std::string& theorem) { return theorem.ends_with("error-rate"); }

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::string format_parts(const DeltaBudget& budget) {
  std::string out;
  for (double p : budget.parts()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", p);
    if (!out.empty()) out += ';';
    out += buf;
  }
  return out;
}

// Answers queries from a match set computed up front.
class PrecomputedQueries final : public QueryMatcher {
 public:
  explicit PrecomputedQueries(const MatchSet& matches) : matches_(matches) {}
  PerNodeView query(NodeIndex x) override {
    ++count_;
    return matches_.view(x);
  }
  std::size_t query_count() const override { return count_; }

 private:
  const MatchSet& matches_;
  std::size_t count_ = 0;
};

std::vector<IdPair> to_ids(const NetworkPair& pair, const std::vector<NodePair>& pairs) {
  std::vector<IdPair> out;
  out.reserve(pairs.size());
  for (const auto& [x, y] : pairs) out.emplace_back(pair.x_net().id(x), pair.y_net().id(y));
  return out;
}

std::size_t max_matches_per_node(const MatchSet& matches) {
  std::size_t best = 1;
  for (NodeIndex x = 0; x < matches.x_count(); ++x) best = std::max(best, matches.matches_of(x).size());
  return best;
}

bool selected(const ExperimentConfig& cfg, const std::string& theorem) {
  return cfg.theorems.empty() ||
         std::find(cfg.theorems.begin(), cfg.theorems.end(), theorem) != cfg.theorems.end();
}

bool is_data_degeneracy(const Error& e) {
  return e.code() == "no-usable-sample" || e.code() == "no-identified-matches" ||
         e.code() == "empty-sample";
}

}  // namespace

void ExperimentConfig::validate() const {
  generator.validate();
  matcher_holdout.validate();
  if (matcher_complete) matcher_complete->validate();
  if (trials < 1) throw Error("invalid-config", "trials must be at least 1");
  if (methods.empty()) throw Error("invalid-config", "at least one bound method required");
  (void)Confidence(delta);
  for (const auto& name : theorems) certificate_terms(name);
  if (sample_sizes.s_x > generator.n_entities || sample_sizes.s_x_prime > generator.n_entities) {
    throw Error("invalid-config", "node sample sizes exceed n_entities");
  }
  if (sample_sizes.s_m + sample_sizes.t > generator.n_entities) {
    throw Error("invalid-config", "s_m + t exceeds n_entities");
  }
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("invalid-config", "experiment config must be a JSON object");
  for (const auto& item : j.items()) {
    static const std::vector<std::string> allowed = {
        "generator", "matcher_holdout", "matcher_complete", "sample_sizes", "methods",
        "delta",     "theorems",        "trials",           "seed",         "output_path"};
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw Error("invalid-config", "experiment: unknown key '" + item.key() + "'");
    }
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("generator")) cfg.generator = generator_config_from_json(j.at("generator"));
    if (j.contains("matcher_holdout")) {
      cfg.matcher_holdout = matcher_config_from_json(j.at("matcher_holdout"));
    }
    if (j.contains("matcher_complete") && !j.at("matcher_complete").is_null()) {
      cfg.matcher_complete = matcher_config_from_json(j.at("matcher_complete"));
    }
    if (j.contains("sample_sizes")) {
      const auto& s = j.at("sample_sizes");
      for (const auto& item : s.items()) {
        if (item.key() != "s_m" && item.key() != "s_x" && item.key() != "s_x_prime" && item.key() != "t") {
          throw Error("invalid-config", "sample_sizes: unknown key '" + item.key() + "'");
        }
      }
      cfg.sample_sizes.s_m = s.value("s_m", cfg.sample_sizes.s_m);
      cfg.sample_sizes.s_x = s.value("s_x", cfg.sample_sizes.s_x);
      cfg.sample_sizes.s_x_prime = s.value("s_x_prime", cfg.sample_sizes.s_x_prime);
      cfg.sample_sizes.t = s.value("t", cfg.sample_sizes.t);
    }
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : j.at("methods")) cfg.methods.push_back(parse_bound_method(m.get<std::string>()));
    }
    cfg.delta = j.value("delta", cfg.delta);
    if (j.contains("theorems")) cfg.theorems = j.at("theorems").get<std::vector<std::string>>();
    cfg.trials = j.value("trials", cfg.trials);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.output_path = j.value("output_path", cfg.output_path);
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid-config", std::string("experiment: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["generator"] = to_json(cfg.generator);
  j["matcher_holdout"] = to_json(cfg.matcher_holdout);
  j["matcher_complete"] = cfg.matcher_complete ? to_json(*cfg.matcher_complete) : nlohmann::json(nullptr);
  j["sample_sizes"] = {{"s_m", cfg.sample_sizes.s_m},
                       {"s_x", cfg.sample_sizes.s_x},
                       {"s_x_prime", cfg.sample_sizes.s_x_prime},
                       {"t", cfg.sample_sizes.t}};
  j["methods"] = nlohmann::json::array();
  for (auto m : cfg.methods) j["methods"].push_back(std::string(to_string(m)));
  j["delta"] = cfg.delta;
  j["theorems"] = cfg.theorems;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["output_path"] = cfg.output_path;
  return j;
}

const std::vector<std::string>& certificate_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, terms] : certificate_table()) out.push_back(name);
    return out;
  }();
  return names;
}

std::size_t certificate_terms(const std::string& name) {
  for (const auto& [known, terms] : certificate_table()) {
    if (known == name) return terms;
  }
  throw Error("invalid-config", "unknown certificate '" + name + "'");
}

std::vector<TrialOutcome> run_trial(const ExperimentConfig& cfg, std::size_t trial) {
  Rng rng(cfg.seed, trial);
  GeneratorConfig gen = cfg.generator;
  gen.rng_seed = rng();
  const GeneratedPair generated = generate_pair(gen);
  const NetworkPair& pair = generated.pair;
  const MatchSet& truth = generated.truth;

  // Training and validation matches via the overlapping split, so that both
  // behave as independent uniform draws from M.
  const auto actual_pairs = truth.pairs();
  const auto& sizes = cfg.sample_sizes;
  if (sizes.t + sizes.s_m > actual_pairs.size()) {
    throw Error("invalid-config", "s_m + t exceeds |M| = " + std::to_string(actual_pairs.size()));
  }
  const auto labeled =
      sample_without_replacement(std::span<const NodePair>(actual_pairs), sizes.t + sizes.s_m, rng);
  RngChoices choices(rng);
  const auto split = split_train_validation(std::span<const NodePair>(labeled),
                                            static_cast<std::int64_t>(actual_pairs.size()), sizes.t,
                                            sizes.s_m, choices);
  const std::size_t x_count = pair.x_net().node_count();
  if (sizes.s_x > x_count || sizes.s_x_prime > x_count) {
    throw Error("invalid-config", "node sample larger than |X| = " + std::to_string(x_count));
  }
  std::vector<NodeIndex> s_x;
  for (auto pos : sample_positions(x_count, sizes.s_x, rng)) s_x.push_back(static_cast<NodeIndex>(pos));
  std::vector<NodeIndex> s_x_prime;
  for (auto pos : sample_positions(x_count, sizes.s_x_prime, rng)) {
    s_x_prime.push_back(static_cast<NodeIndex>(pos));
  }

  const auto holdout = MatcherHandle::holdout(cfg.matcher_holdout, to_ids(pair, split.train));
  std::vector<NodePair> validation_pairs = split.validation;
  for (NodeIndex x : s_x) {
    for (NodeIndex y : truth.matches_of(x)) validation_pairs.emplace_back(x, y);
  }
  const auto base = cfg.matcher_complete
                        ? MatcherHandle::holdout(*cfg.matcher_complete, to_ids(pair, split.train))
                        : holdout;
  const auto complete = base.complete_with(to_ids(pair, validation_pairs));
  const MatchSet m_hat_holdout = run_batch(holdout, pair);
  const MatchSet m_hat_complete = run_batch(complete, pair);
  const bool identical = holdout.equivalent(complete);

  const BatchMetrics batch_holdout = true_batch_metrics(m_hat_holdout, truth);
  const BatchMetrics batch_complete = true_batch_metrics(m_hat_complete, truth);
  const QueryMetrics query_holdout = true_query_metrics(m_hat_holdout, truth);
  const QueryMetrics query_complete = true_query_metrics(m_hat_complete, truth);
  const std::size_t k_cap = std::max(max_matches_per_node(m_hat_holdout), max_matches_per_node(m_hat_complete));

  std::vector<TrialOutcome> out;
  for (const auto& name : certificate_names()) {
    if (!selected(cfg, name)) continue;
    std::optional<double> true_value;
    if (name == "holdout-batch-recall") true_value = batch_holdout.recall;
    if (name == "holdout-batch-precision") true_value = batch_holdout.precision;
    if (name == "complete-batch-recall") true_value = batch_complete.recall;
    if (name == "complete-batch-precision") true_value = batch_complete.precision;
    if (name == "holdout-query-precision") true_value = query_holdout.precision;
    if (name == "holdout-query-recall") true_value = query_holdout.recall;
    if (name == "complete-query-recall") true_value = query_complete.recall;
    if (name == "complete-query-precision") true_value = query_complete.precision;
    if (name == "holdout-error-rate") true_value = query_holdout.error_rate;
    if (name == "complete-error-rate") true_value = query_complete.error_rate;

    for (BoundMethod method : cfg.methods) {
      TrialOutcome outcome;
      outcome.theorem = name;
      outcome.method = method;
      if (!true_value) {
        out.push_back(outcome);
        continue;
      }
      const DeltaBudget budget = DeltaBudget::equal_split(cfg.delta, certificate_terms(name));
      try {
        double bound = 0.0;
        if (name.find("batch") != std::string::npos) {
          BatchValidationInput in;
          in.pair = &pair;
          in.m_hat_holdout = &m_hat_holdout;
          in.m_hat_complete = &m_hat_complete;
          in.s_m = split.validation;
          in.s_x = s_x;
          in.s_x_actual = &truth;
          in.m_size = PopulationSize{static_cast<std::int64_t>(truth.size()), true};
          in.k_y = 1;
          in.method = method;
          in.budget = budget;
          if (name == "holdout-batch-recall") bound = holdout_batch_recall(in).bound;
          if (name == "holdout-batch-precision") bound = holdout_batch_precision(in).bound;
          if (name == "complete-batch-recall") bound = complete_batch_recall(in).bound;
          if (name == "complete-batch-precision") bound = complete_batch_precision(in).bound;
        } else {
          PrecomputedQueries holdout_queries(m_hat_holdout);
          PrecomputedQueries complete_queries(m_hat_complete);
          MatchSetTruth truth_source(truth);
          QueryValidationInput in;
          in.pair = &pair;
          in.holdout = &holdout_queries;
          in.complete = &complete_queries;
          in.complete_identical = identical;
          in.s_x = s_x;
          in.s_x_prime = s_x_prime;
          in.truth = &truth_source;
          in.k_cap = k_cap;
          in.method = method;
          in.budget = budget;
          if (name == "holdout-query-precision" || name == "holdout-query-recall") {
            in.budget = DeltaBudget({cfg.delta, cfg.delta});
            const auto reports = holdout_query_bounds(in);
            bound = name == "holdout-query-precision" ? reports.first.bound : reports.second.bound;
          }
          if (name == "complete-query-recall") bound = complete_query_recall(in).bound;
          if (name == "complete-query-precision") bound = complete_query_precision(in).bound;
          if (name == "holdout-error-rate") bound = holdout_error_rate(in).bound;
          if (name == "complete-error-rate") bound = complete_error_rate(in).bound;
        }
        outcome.evaluated = true;
        outcome.bound = bound;
        outcome.truth = *true_value;
        constexpr double kSlack = 1e-12;
        outcome.failed = is_upper(name) ? bound < *true_value - kSlack : bound > *true_value + kSlack;
      } catch (const Error& e) {
        if (!is_data_degeneracy(e)) throw;
      }
      out.push_back(outcome);
    }
  }
  return out;
}

double CoverageRow::failure_rate() const {
  return evaluated == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(evaluated);
}

double CoverageRow::tolerance() const {
  const double d = budget.total();
  if (evaluated == 0) return d;
  return d + 3.0 * std::sqrt(d * (1.0 - d) / static_cast<double>(evaluated));
}

std::string CoverageTable::to_csv() const {
  std::string out =
      "theorem,method,delta_parts,trials,evaluated,skipped,failures,failure_rate,delta_total,"
      "tolerance,within_tolerance,mean_bound,mean_truth\n";
  for (const auto& r : rows) {
    out += r.theorem + ',' + r.method + ',' + format_parts(r.budget) + ',' + std::to_string(r.trials) + ',' +
           std::to_string(r.evaluated) + ',' + std::to_string(r.trials - r.evaluated) + ',' +
           std::to_string(r.failures) + ',' + format_number(r.failure_rate()) + ',' +
           format_number(r.budget.total()) + ',' + format_number(r.tolerance()) + ',' +
           (r.failure_rate() <= r.tolerance() ? "true" : "false") + ',' + format_number(r.mean_bound) +
           ',' + format_number(r.mean_truth) + '\n';
  }
  return out;
}

nlohmann::json CoverageTable::to_json() const {
  nlohmann::json j;
  j["config"] = config;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"theorem", r.theorem},
                         {"method", r.method},
                         {"delta_parts", r.budget.parts()},
                         {"delta_total", r.budget.total()},
                         {"trials", r.trials},
                         {"evaluated", r.evaluated},
                         {"skipped", r.trials - r.evaluated},
                         {"failures", r.failures},
                         {"failure_rate", r.failure_rate()},
                         {"tolerance", r.tolerance()},
                         {"within_tolerance", r.failure_rate() <= r.tolerance()},
                         {"mean_bound", r.mean_bound},
                         {"mean_truth", r.mean_truth}});
  }
  return j;
}

CoverageTable run_coverage(const ExperimentConfig& cfg, std::size_t jobs) {
  cfg.validate();
  jobs = std::clamp<std::size_t>(jobs, 1, cfg.trials);
  std::vector<std::vector<TrialOutcome>> results(cfg.trials);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_trial = cfg.trials;
  std::exception_ptr error;

  auto worker = [&] {
    for (std::size_t trial = next++; trial < cfg.trials; trial = next++) {
      try {
        results[trial] = run_trial(cfg, trial);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (trial < error_trial) {
          error_trial = trial;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t i = 1; i < jobs; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const Error& e) {
      throw Error(e.code(), "trial " + std::to_string(error_trial) + ": " + e.message());
    } catch (const std::exception& e) {
      throw Error("trial-failed", "trial " + std::to_string(error_trial) + ": " + e.what());
    }
  }

  // Every trial yields outcomes in the same (certificate, method) order.
  std::vector<CoverageRow> rows;
  std::vector<double> bound_sums;
  std::vector<double> truth_sums;
  for (const auto& o : results.front()) {
    CoverageRow row;
    row.theorem = o.theorem;
    row.method = std::string(to_string(o.method));
    row.budget = DeltaBudget::equal_split(cfg.delta, certificate_terms(o.theorem));
    rows.push_back(std::move(row));
  }
  bound_sums.assign(rows.size(), 0.0);
  truth_sums.assign(rows.size(), 0.0);
  for (const auto& trial : results) {
    for (std::size_t i = 0; i < trial.size(); ++i) {
      auto& row = rows[i];
      ++row.trials;
      if (!trial[i].evaluated) continue;
      ++row.evaluated;
      row.failures += trial[i].failed ? 1 : 0;
      bound_sums[i] += trial[i].bound;
      truth_sums[i] += trial[i].truth;
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].evaluated == 0) continue;
    rows[i].mean_bound = bound_sums[i] / static_cast<double>(rows[i].evaluated);
    rows[i].mean_truth = truth_sums[i] / static_cast<double>(rows[i].evaluated);
  }
  std::sort(rows.begin(), rows.end(), [](const CoverageRow& a, const CoverageRow& b) {
    return std::tie(a.theorem, a.method, a.budget.parts()) < std::tie(b.theorem, b.method, b.budget.parts());
  });
  return CoverageTable{to_json(cfg), std::move(rows)};
}

}  // namespace matchcert
