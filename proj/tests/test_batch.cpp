#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "matchcert/batch_validation.hpp"
#include "oracles.hpp"

using namespace matchcert;
using fixture::code_of;

namespace {

// 200 x nodes, 100 actual matches (x_i, y_i) for i < 100.
struct Scene {
  NetworkPair pair = fixture::numbered_pair(200, 200);
  MatchSet truth = fixture::diagonal(pair, 0, 100);

  std::vector<NodePair> s_m(std::size_t first, std::size_t last) const {
    std::vector<NodePair> out;
    for (std::size_t i = first; i < last; ++i) {
      out.emplace_back(static_cast<NodeIndex>(i), static_cast<NodeIndex>(i));
    }
    return out;
  }

  BatchValidationInput input(const MatchSet& holdout, BoundMethod method, std::vector<double> parts) const {
    BatchValidationInput in;
    in.pair = &pair;
    in.m_hat_holdout = &holdout;
    in.s_m = s_m(0, 20);
    in.s_x = fixture::range(50, 150);
    in.s_x_actual = &truth;
    in.m_size = PopulationSize{100, true};
    in.method = method;
    in.budget = DeltaBudget(std::move(parts));
    return in;
  }
};

const BoundMethod kMethods[] = {BoundMethod::hoeffding, BoundMethod::empirical_bernstein_serfling,
                                BoundMethod::hypergeometric_exact};

}  // namespace

TEST_CASE("holdout recall from a fully identified sample") {
  const Scene scene;
  const auto in = scene.input(scene.truth, BoundMethod::hypergeometric_exact, {0.05});
  const auto report = holdout_batch_recall(in);
  CHECK(report.bound == hypergeom_invert_lower(100, 20, 20, Confidence(0.05)));
  CHECK(report.term_methods.at("recall_term") == "hypergeometric-exact");
  CHECK(report.failure_probability() == 0.05);
}

TEST_CASE("holdout recall with nothing identified is zero") {
  const Scene scene;
  const auto empty = MatchSet::for_pair(scene.pair);
  for (auto method : kMethods) {
    CHECK(holdout_batch_recall(scene.input(empty, method, {0.05})).bound == 0.0);
  }
}

TEST_CASE("holdout recall census") {
  const Scene scene;
  auto in = scene.input(scene.truth, BoundMethod::hypergeometric_exact, {0.05});
  in.s_m = scene.s_m(0, 100);
  CHECK(holdout_batch_recall(in).bound == 1.0);
}

TEST_CASE("unknown match count disables exact inversion") {
  const Scene scene;
  auto in = scene.input(scene.truth, BoundMethod::hypergeometric_exact, {0.05});
  in.m_size.reset();
  const auto report = holdout_batch_recall(in);
  CHECK(report.term_methods.at("recall_term") == "empirical-bernstein-serfling");
  CHECK(report.bound < 1.0);
}

TEST_CASE("recall bound grows with evidence") {
  const Scene scene;
  for (auto method : kMethods) {
    double previous = -1.0;
    for (std::size_t hits = 0; hits <= 20; ++hits) {
      const auto holdout = fixture::diagonal(scene.pair, 0, hits);
      const double bound = holdout_batch_recall(scene.input(holdout, method, {0.05})).bound;
      CHECK(bound >= previous);
      previous = bound;
    }
  }
}

TEST_CASE("density term in closed form") {
  const Scene scene;
  auto in = scene.input(scene.truth, BoundMethod::hoeffding, {0.025, 0.01});
  in.s_x = fixture::range(0, 60);
  const auto report = holdout_batch_precision(in);
  const double expected = 1.0 - oracle::hoeffding_slack(1.0, 60, 0.01);
  CHECK(std::abs(report.terms.at("match_density_term") - expected) < 1e-12);
  const double recall = report.terms.at("recall_term");
  CHECK(std::abs(recall - (1.0 - oracle::hoeffding_slack(1.0, 20, 0.025))) < 1e-12);
  CHECK(report.bound == doctest::Approx(std::min(1.0, 200.0 / 100.0 * recall * expected)).epsilon(1e-12));
}

TEST_CASE("holdout precision of a perfect matcher on census samples") {
  const Scene scene;
  auto in = scene.input(scene.truth, BoundMethod::hypergeometric_exact, {0.025, 0.025});
  in.s_m = scene.s_m(0, 100);
  in.s_x = fixture::range(0, 200);
  CHECK(std::abs(holdout_batch_precision(in).bound - 1.0) < 1e-12);
}

TEST_CASE("holdout precision guards") {
  const Scene scene;
  const auto empty = MatchSet::for_pair(scene.pair);
  CHECK(code_of([&] { holdout_batch_precision(scene.input(empty, BoundMethod::hoeffding, {0.025, 0.025})); }) ==
        "no-identified-matches");
  CHECK(code_of([&] { holdout_batch_precision(scene.input(scene.truth, BoundMethod::hoeffding, {0.05})); }) ==
        "budget-mismatch");
  auto in = scene.input(scene.truth, BoundMethod::hoeffding, {0.05});
  in.s_m.clear();
  CHECK(code_of([&] { holdout_batch_recall(in); }) == "empty-sample");

  // Only unmatched x are identified, so no S_M pair is found.
  const auto wrong = fixture::diagonal(scene.pair, 150, 160);
  CHECK(holdout_batch_precision(scene.input(wrong, BoundMethod::hoeffding, {0.025, 0.025})).bound == 0.0);

  auto two = scene.truth;
  two.insert(60, 61);
  auto crowded = scene.input(scene.truth, BoundMethod::hoeffding, {0.025, 0.025});
  crowded.s_x_actual = &two;
  CHECK(code_of([&] { holdout_batch_precision(crowded); }) == "ky-violated");
}

TEST_CASE("complete variants reduce to holdout variants") {
  const Scene scene;
  const auto holdout = fixture::diagonal(scene.pair, 0, 70);
  for (auto method : kMethods) {
    auto in = scene.input(holdout, method, {0.02, 0.03});
    in.m_hat_complete = &holdout;
    auto single = in;
    single.budget = DeltaBudget({0.02});
    const auto complete_recall = complete_batch_recall(in);
    CHECK(complete_recall.bound == holdout_batch_recall(single).bound);
    CHECK(complete_recall.terms.at("disagreement_count") == 0.0);
    CHECK(complete_batch_precision(in).bound == holdout_batch_precision(in).bound);
  }
}

TEST_CASE("complete recall subtracts the disagreement") {
  const Scene scene;
  const auto holdout = fixture::diagonal(scene.pair, 0, 100);
  const auto complete = fixture::diagonal(scene.pair, 0, 90);
  auto in = scene.input(holdout, BoundMethod::hoeffding, {0.025, 0.025});
  in.m_hat_complete = &complete;
  const auto report = complete_batch_recall(in);
  const double density = report.terms.at("match_density_term");
  const double expected = report.terms.at("recall_term") - 10.0 / (200.0 * density);
  CHECK(report.bound == doctest::Approx(expected).epsilon(1e-12));
  CHECK(!report.vacuous);

  const auto huge = fixture::diagonal(scene.pair, 0, 200);
  in.m_hat_holdout = &huge;
  CHECK(complete_batch_recall(in).bound == 0.0);
}

TEST_CASE("complete recall with a vacuous denominator") {
  const Scene scene;
  const auto holdout = fixture::diagonal(scene.pair, 0, 100);
  const auto complete = fixture::diagonal(scene.pair, 0, 90);
  auto in = scene.input(holdout, BoundMethod::hoeffding, {0.025, 0.025});
  in.m_hat_complete = &complete;
  in.s_x = fixture::range(150, 160);  // no sampled x has a match
  const auto report = complete_batch_recall(in);
  CHECK(report.vacuous);
  CHECK(report.has_flag(kFlagVacuous));
  CHECK(report.bound == 0.0);

  in.m_hat_complete = nullptr;
  CHECK(code_of([&] { complete_batch_recall(in); }) == "missing-complete");
}

TEST_CASE("complete precision subtracts the disagreement share") {
  const Scene scene;
  const auto holdout = fixture::diagonal(scene.pair, 0, 100);
  const auto complete = fixture::diagonal(scene.pair, 0, 80);
  auto in = scene.input(holdout, BoundMethod::empirical_bernstein_serfling, {0.025, 0.025});
  in.m_hat_complete = &complete;
  const auto report = complete_batch_precision(in);
  const double expected = 200.0 / 80.0 * report.terms.at("recall_term") * report.terms.at("match_density_term") -
                          20.0 / 80.0;
  CHECK(report.bound == doctest::Approx(std::clamp(expected, 0.0, 1.0)).epsilon(1e-12));

  const auto tiny = fixture::diagonal(scene.pair, 0, 1);
  in.m_hat_complete = &tiny;
  CHECK(complete_batch_precision(in).bound == 0.0);
  const auto empty = MatchSet::for_pair(scene.pair);
  in.m_hat_complete = &empty;
  CHECK(code_of([&] { complete_batch_precision(in); }) == "no-identified-matches");
}

TEST_CASE("true batch metrics") {
  const auto pair = fixture::numbered_pair(10, 10);
  const auto actual = fixture::diagonal(pair, 0, 6);
  auto identified = fixture::diagonal(pair, 0, 3);
  identified.insert(8, 9);
  const auto both = true_batch_metrics(identified, actual);
  CHECK(*both.precision == 0.75);
  CHECK(*both.recall == 0.5);

  const auto perfect = true_batch_metrics(actual, actual);
  CHECK(*perfect.precision == 1.0);
  CHECK(*perfect.recall == 1.0);

  const auto disjoint = true_batch_metrics(fixture::diagonal(pair, 6, 9), actual);
  CHECK(*disjoint.precision == 0.0);
  CHECK(*disjoint.recall == 0.0);

  const auto empty = true_batch_metrics(MatchSet::for_pair(pair), MatchSet::for_pair(pair));
  CHECK(!empty.precision);
  CHECK(!empty.recall);
}

TEST_CASE("score bands validated simultaneously") {
  const Scene scene;
  ScoredMatches scored{fixture::diagonal(scene.pair, 0, 100), {}};
  for (const auto& p : scored.matches.pairs()) scored.scores.emplace_back(p, p.first < 40 ? 1.0 : 5.0);
  const double thresholds[] = {3.0};
  const auto bands = partition_by_score(scored, thresholds);
  REQUIRE(bands.size() == 2);
  CHECK(bands[0].size() == 40);
  CHECK(bands[1].size() == 60);

  auto in = scene.input(scored.matches, BoundMethod::hoeffding, {0.025, 0.025});
  const auto joint = simultaneous_batch_recall(in, bands);
  CHECK(joint.joint_confidence == 0.95);
  REQUIRE(joint.reports.size() == 2);
  for (const auto& r : joint.reports) CHECK(r.failure_probability() == 0.025);

  const double descending[] = {3.0, 1.0};
  CHECK(code_of([&] { partition_by_score(scored, descending); }) == "invalid-thresholds");
  in.budget = DeltaBudget({0.05});
  CHECK(code_of([&] { simultaneous_batch_recall(in, bands); }) == "budget-mismatch");
}
