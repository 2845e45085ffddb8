// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "matchcert/batch_validation.hpp"
#include "matchcert/bounds.hpp"
#include "matchcert/error.hpp"
#include "matchcert/experiment.hpp"
#include "matchcert/query_validation.hpp"
#include "matchcert/rng.hpp"
#include "matchcert/sampling.hpp"
#include "matchcert/synth.hpp"
#include "oracles.hpp"
#include "split_fit.hpp"

using namespace matchcert;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& id, const std::string& title, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = check();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.pass) ++failures;
  std::printf("%s [%s] %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(),
              out.detail.c_str(), seconds);
  std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

// Hypergeometric pmf, tails and inversions against exact rationals.
Outcome hypergeometric_exactness() {
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::int64_t n = 1; n <= 30; ++n) {
    for (std::int64_t s = 0; s <= n; ++s) {
      for (std::int64_t m = 0; m <= n; ++m) {
        for (std::int64_t k = 0; k <= s; ++k) {
          worst = std::max(worst, std::abs(hypergeom_pmf(m, n, s, k) - static_cast<double>(oracle::pmf(m, n, s, k))));
          worst = std::max(worst, std::abs(hypergeom_tail_upper(m, n, s, k) -
                                           static_cast<double>(oracle::tail_upper(m, n, s, k))));
          worst = std::max(worst, std::abs(hypergeom_tail_lower(m, n, s, k) -
                                           static_cast<double>(oracle::tail_lower(m, n, s, k))));
          checked += 3;
        }
      }
    }
  }
  std::size_t inversion_mismatches = 0;
  const oracle::Fraction deltas[] = {{1, 100}, {1, 20}, {1, 5}, {1, 2}};
  for (std::int64_t n = 1; n <= 30; ++n) {
    for (std::int64_t s = 1; s <= n; ++s) {
      for (std::int64_t k = 0; k <= s; ++k) {
        for (const auto& d : deltas) {
          const Confidence delta(d.value());
          inversion_mismatches += hypergeom_invert_lower(n, s, k, delta) != oracle::invert_lower(n, s, k, d);
          inversion_mismatches += hypergeom_invert_upper(n, s, k, delta) != oracle::invert_upper(n, s, k, d);
          checked += 2;
        }
      }
    }
  }
  const double fixture_lower = hypergeom_invert_lower(10, 5, 5, Confidence(0.05));
  const double fixture_upper = hypergeom_invert_upper(10, 5, 0, Confidence(0.05));
  const bool pass = worst < 1e-12 && inversion_mismatches == 0 && fixture_lower == 0.7 && fixture_upper == 0.3;
  return {pass, std::to_string(checked) + " values, max abs err " + fmt("%.3g", worst) + ", " +
                    std::to_string(inversion_mismatches) + " inversion mismatches, fixtures " +
                    fmt("%.17g / %.17g", fixture_lower, fixture_upper)};
}

// One-sided failure rates on binary populations.
Outcome concentration_coverage() {
  constexpr std::size_t kN = 10000;
  constexpr std::size_t kS = 200;
  constexpr std::size_t kTrials = 2000;
  const double mus[] = {0.05, 0.5, 0.9};
  const BoundMethod methods[] = {BoundMethod::hoeffding, BoundMethod::empirical_bernstein_serfling,
                                 BoundMethod::hypergeometric_exact};
  double worst = 0.0;
  std::string worst_label;
  for (std::size_t mi = 0; mi < 3; ++mi) {
    const double mu = mus[mi];
    const auto ones = static_cast<std::size_t>(std::llround(mu * kN));
    for (auto method : methods) {
      std::size_t lower_fail = 0;
      std::size_t upper_fail = 0;
      for (std::size_t trial = 0; trial < kTrials; ++trial) {
        Rng rng(20240 + mi, trial);
        std::vector<double> values;
        for (auto pos : sample_positions(kN, kS, rng)) values.push_back(pos < ones ? 1.0 : 0.0);
        const auto r = bound_mean(PopulationSpec{static_cast<std::int64_t>(kN), 0.0, 1.0}, values, method,
                                  Confidence(0.05), Side::both);
        lower_fail += r.lower > mu ? 1 : 0;
        upper_fail += r.upper < mu ? 1 : 0;
      }
      for (auto [side, count] : {std::pair{"lower", lower_fail}, std::pair{"upper", upper_fail}}) {
        const double rate = static_cast<double>(count) / kTrials;
        if (rate >= worst) {
          worst = rate;
          worst_label = std::string(to_string(method)) + " " + side + " mu=" + fmt("%.2f", mu);
        }
      }
    }
  }
  return {worst <= 0.065, "worst failure rate " + fmt("%.4f", worst) + " (" + worst_label + "), limit 0.065"};
}

// Low-variance fixture: sigma-hat 0.05, s = 1000, n >> s, delta 0.05.
Outcome low_variance_fixture(bool check_value) {
  std::vector<double> values;
  for (int i = 0; i < 1000; ++i) values.push_back(i % 2 == 0 ? 0.45 : 0.55);
  const PopulationSpec pop{std::int64_t{1} << 40, 0.0, 1.0};
  const double mean = sample_mean(values);
  const double ebs = mean - ebs_bounds(pop, values, Confidence(0.05)).lower;
  const double hoeffding = mean - hoeffding_bounds(pop, values, Confidence(0.05)).lower;
  const std::string detail = "sigma-hat " + fmt("%.6f", sample_sigma_hat(values)) + ", EBS slack " +
                             fmt("%.6f", ebs) + ", Hoeffding slack " + fmt("%.6f", hoeffding);
  if (!check_value) return {ebs < hoeffding, detail};
  const bool pass = std::abs(ebs - 0.0172) <= 1e-4 && std::abs(hoeffding - 0.0387) <= 1e-4;
  return {pass, detail + "; expected 0.0172 and 0.0387 to 1e-4"};
}

// Exact inversion never looser than Hoeffding on binary data.
Outcome tightness_ordering() {
  Rng rng(31337);
  std::size_t violations = 0;
  double min_gap = 1.0;
  for (int i = 0; i < 1000; ++i) {
    const auto n = static_cast<std::int64_t>(20 + rng.below(5000));
    const auto s = static_cast<std::int64_t>(1 + rng.below(static_cast<std::uint64_t>(n)));
    const auto k = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(s) + 1));
    const double delta = 0.001 + 0.299 * rng.uniform();
    std::vector<double> values(static_cast<std::size_t>(s), 0.0);
    std::fill_n(values.begin(), k, 1.0);
    const PopulationSpec pop{n, 0.0, 1.0};
    const double exact =
        bound_mean(pop, values, BoundMethod::hypergeometric_exact, Confidence(delta), Side::lower).lower;
    const double hoeffding = bound_mean(pop, values, BoundMethod::hoeffding, Confidence(delta), Side::lower).lower;
    violations += exact < hoeffding ? 1 : 0;
    min_gap = std::min(min_gap, exact - hoeffding);
  }
  const auto fixture = low_variance_fixture(false);
  return {violations == 0 && fixture.pass, std::to_string(violations) +
                                               " of 1000 instances looser than Hoeffding, min gap " +
                                               fmt("%.3g", min_gap) + "; " + fixture.detail};
}

ExperimentConfig acceptance_experiment() {
  ExperimentConfig cfg;
  cfg.generator.n_entities = 2000;
  cfg.generator.er_p = 0.01;
  cfg.generator.edge_retain_x = 0.8;
  cfg.generator.edge_retain_y = 0.8;
  cfg.generator.node_drop_x = 0.1;
  cfg.generator.node_drop_y = 0.1;
  cfg.matcher_holdout.kind = MatcherKind::percolation;
  cfg.matcher_holdout.seeds.kind = SeedRule::Kind::verified_sample;
  cfg.matcher_holdout.threshold = 2;
  cfg.sample_sizes = {200, 200, 200, 100};
  cfg.delta = 0.05;
  cfg.trials = 500;
  cfg.seed = 7;
  return cfg;
}

Outcome theorem_coverage() {
  const auto table = run_coverage(acceptance_experiment(), std::max(1u, std::thread::hardware_concurrency()));
  std::size_t bad = 0;
  double worst_excess = -1.0;
  std::string worst;
  std::size_t min_evaluated = 500;
  for (const auto& row : table.rows) {
    const double excess = row.failure_rate() - row.tolerance();
    if (excess > 0) ++bad;
    min_evaluated = std::min(min_evaluated, row.evaluated);
    if (excess > worst_excess) {
      worst_excess = excess;
      worst = row.theorem + "/" + row.method + " rate " + fmt("%.4f", row.failure_rate()) + " tol " +
              fmt("%.4f", row.tolerance());
    }
  }
  return {bad == 0 && !table.rows.empty(), std::to_string(table.rows.size()) + " rows, " + std::to_string(bad) +
                                               " above tolerance, min evaluated " + std::to_string(min_evaluated) +
                                               ", closest " + worst};
}

std::vector<IdPair> ids_of(const NetworkPair& pair, std::span<const NodePair> pairs) {
  std::vector<IdPair> out;
  for (const auto& [x, y] : pairs) out.emplace_back(pair.x_net().id(x), pair.y_net().id(y));
  return out;
}

// Complete bounds equal holdout bounds when both matchers coincide.
Outcome reduction_identities() {
  std::size_t compared = 0;
  std::size_t mismatches = 0;
  std::size_t configs_used = 0;
  const BoundMethod methods[] = {BoundMethod::hoeffding, BoundMethod::empirical_bernstein_serfling,
                                 BoundMethod::hypergeometric_exact};
  for (std::uint64_t c = 0; c < 100; ++c) {
    Rng rng(555, c);
    GeneratorConfig gen;
    gen.n_entities = 150 + rng.below(350);
    gen.er_p = 0.01 + 0.05 * rng.uniform();
    gen.edge_retain_x = 0.6 + 0.4 * rng.uniform();
    gen.edge_retain_y = 0.6 + 0.4 * rng.uniform();
    gen.node_drop_x = 0.2 * rng.uniform();
    gen.node_drop_y = 0.2 * rng.uniform();
    gen.rng_seed = rng();
    const auto g = generate_pair(gen);
    const auto method = methods[rng.below(3)];
    const double delta = 0.01 + 0.09 * rng.uniform();

    auto truth_pairs = g.truth.pairs();
    const std::size_t t = std::min<std::size_t>(truth_pairs.size() / 4, 10 + rng.below(40));
    const std::size_t s_m = std::min<std::size_t>(truth_pairs.size() - t, 20 + rng.below(80));
    const auto labeled = sample_without_replacement(std::span<const NodePair>(truth_pairs), t + s_m, rng);
    const std::span<const NodePair> train(labeled.data(), t);
    const std::span<const NodePair> validation(labeled.data() + t, s_m);

    MatcherConfig mc;
    mc.threshold = 1 + rng.below(3);
    const auto holdout_handle = MatcherHandle::holdout(mc, ids_of(g.pair, train));
    const auto complete_handle = holdout_handle.complete_with(ids_of(g.pair, train));
    if (!holdout_handle.equivalent(complete_handle)) return {false, "complete handle not equivalent"};
    const MatchSet m_holdout = run_batch(holdout_handle, g.pair);
    const MatchSet m_complete = run_batch(complete_handle, g.pair);

    const std::size_t x_count = g.pair.x_net().node_count();
    std::vector<NodeIndex> s_x;
    std::vector<NodeIndex> s_x_prime;
    for (auto pos : sample_positions(x_count, std::min<std::size_t>(x_count, 30 + rng.below(120)), rng)) {
      s_x.push_back(static_cast<NodeIndex>(pos));
    }
    for (auto pos : sample_positions(x_count, std::min<std::size_t>(x_count, 30 + rng.below(120)), rng)) {
      s_x_prime.push_back(static_cast<NodeIndex>(pos));
    }

    BatchValidationInput batch;
    batch.pair = &g.pair;
    batch.m_hat_holdout = &m_holdout;
    batch.m_hat_complete = &m_complete;
    batch.s_m.assign(validation.begin(), validation.end());
    batch.s_x = s_x;
    batch.s_x_actual = &g.truth;
    batch.m_size = PopulationSize{static_cast<std::int64_t>(g.truth.size()), true};
    batch.method = method;
    batch.budget = DeltaBudget::equal_split(delta, 2);

    BaselineQueryMatcher holdout_query(holdout_handle, g.pair);
    BaselineQueryMatcher complete_query(complete_handle, g.pair);
    MatchSetTruth truth(g.truth);
    QueryValidationInput query;
    query.pair = &g.pair;
    query.holdout = &holdout_query;
    query.complete = &complete_query;
    query.complete_identical = holdout_handle.equivalent(complete_handle);
    query.s_x = s_x;
    query.s_x_prime = s_x_prime;
    query.truth = &truth;
    query.method = method;

    bool used = false;
    auto compare = [&](const std::function<double()>& complete, const std::function<double()>& holdout) {
      try {
        const double a = complete();
        const double b = holdout();
        ++compared;
        mismatches += a == b ? 0 : 1;
        used = true;
      } catch (const Error& e) {
        const std::string code = e.code();
        if (code != "no-usable-sample" && code != "no-identified-matches" && code != "empty-sample") throw;
      }
    };
    const double half = delta / 2.0;
    compare([&] { return complete_batch_recall(batch).bound; },
            [&] {
              auto single = batch;
              single.budget = DeltaBudget({half});
              return holdout_batch_recall(single).bound;
            });
    compare([&] { return complete_batch_precision(batch).bound; }, [&] { return holdout_batch_precision(batch).bound; });
    compare(
        [&] {
          auto in = query;
          in.budget = DeltaBudget({half, half, half});
          return complete_query_recall(in).bound;
        },
        [&] {
          auto in = query;
          in.budget = DeltaBudget({half, half});
          return holdout_query_bounds(in).second.bound;
        });
    compare(
        [&] {
          auto in = query;
          in.budget = DeltaBudget({half, half, half, half});
          return complete_query_precision(in).bound;
        },
        [&] {
          auto in = query;
          in.budget = DeltaBudget({half, half});
          return holdout_query_bounds(in).first.bound;
        });
    compare(
        [&] {
          auto in = query;
          in.budget = DeltaBudget({half, half});
          return complete_error_rate(in).bound;
        },
        [&] {
          auto in = query;
          in.budget = DeltaBudget({half});
          return holdout_error_rate(in).bound;
        });
    configs_used += used ? 1 : 0;
  }
  return {mismatches == 0 && configs_used == 100,
          std::to_string(compared) + " comparisons over " + std::to_string(configs_used) + " configurations, " +
              std::to_string(mismatches) + " differ"};
}

Outcome subsampling_law() {
  const auto law = split_fit::exact_law(6, 2, 2);
  const long double cell = 1.0L / static_cast<long double>(oracle::choose(6, 2) * oracle::choose(6, 2));
  long double worst = 0.0L;
  for (const auto& [outcome, p] : law) worst = std::max(worst, std::abs(p - cell));
  const bool exact_ok = law.size() == 225 && worst < 1e-12L;
  const auto p = split_fit::run(40, 10, 10, 100000, 8080);
  const bool chi_ok = p.train_marginal >= 0.001 && p.validation_marginal >= 0.001 && p.intersection >= 0.001;
  return {exact_ok && chi_ok, std::to_string(law.size()) + " outcomes, max abs diff " +
                                  fmt("%.3g", static_cast<double>(worst)) + "; p-values T " +
                                  fmt("%.4f, S %.4f, |T^S| %.4f", p.train_marginal, p.validation_marginal,
                                      p.intersection)};
}

Outcome union_bound_arithmetic() {
  const double joint = union_confidence(DeltaBudget({0.025, 0.025}));
  GeneratorConfig gen;
  gen.n_entities = 400;
  gen.er_p = 0.03;
  gen.rng_seed = 12;
  const auto g = generate_pair(gen);
  auto seeds = ids_of(g.pair, g.truth.pairs());
  seeds.resize(std::min<std::size_t>(seeds.size(), 40));
  const auto handle = MatcherHandle::holdout(MatcherConfig{}, seeds);
  const auto scored = run_batch_scored(handle, g.pair);
  const double thresholds[] = {3.0};
  const auto bands = partition_by_score(scored, thresholds);
  Rng rng(4);
  const auto truth_pairs = g.truth.pairs();
  BatchValidationInput in;
  in.pair = &g.pair;
  in.m_hat_holdout = &scored.matches;
  in.s_m = sample_without_replacement(std::span<const NodePair>(truth_pairs), 100, rng);
  in.m_size = PopulationSize{static_cast<std::int64_t>(g.truth.size()), true};
  in.budget = DeltaBudget({0.01, 0.03});
  const auto report = simultaneous_batch_recall(in, bands);
  const bool pass = joint == 0.95 && report.reports.size() == 2 && report.joint_confidence == 1.0 - (0.01 + 0.03);
  return {pass, "[0.025, 0.025] -> " + fmt("%.17g", joint) + "; two-band report joint confidence " +
                    fmt("%.17g", report.joint_confidence)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome coverage_determinism() {
  const fs::path dir = fs::temp_directory_path() / ("matchcert_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto cfg = acceptance_experiment();
  cfg.generator.n_entities = 500;
  cfg.sample_sizes = {60, 60, 60, 40};
  cfg.trials = 20;
  std::ofstream(dir / "exp.json") << to_json(cfg).dump(2);
  std::string outputs[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path csv = dir / ("run" + std::to_string(run) + ".csv");
    const std::string cmd = std::string(MATCHCERT_BIN) + " coverage --config " + (dir / "exp.json").string() +
                            " --seed 5 --jobs " + std::to_string(run + 1) + " --out " + csv.string() +
                            " >/dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      fs::remove_all(dir);
      return {false, "coverage command failed"};
    }
    outputs[run] = slurp(csv);
  }
  fs::remove_all(dir);
  const bool pass = !outputs[0].empty() && outputs[0] == outputs[1];
  return {pass, std::to_string(outputs[0].size()) + " CSV bytes, runs " + (pass ? "identical" : "differ")};
}

}  // namespace

int main() {
  criterion("1", "hypergeometric exactness", hypergeometric_exactness);
  criterion("2", "concentration coverage", concentration_coverage);
  criterion("3a", "tightness ordering", tightness_ordering);
  criterion("3b", "low-variance fixture slack values", [] { return low_variance_fixture(true); });
  criterion("4", "certificate coverage end to end", theorem_coverage);
  criterion("5", "reduction identities", reduction_identities);
  criterion("6", "subsampling law", subsampling_law);
  criterion("7", "union bound arithmetic", union_bound_arithmetic);
  criterion("8", "coverage determinism", coverage_determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
