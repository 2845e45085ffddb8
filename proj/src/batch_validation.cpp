#include "matchcert/batch_validation.hpp"

#include <algorithm>

#include "matchcert/error.hpp"
#include "terms.hpp"

namespace matchcert {

namespace {

constexpr std::int64_t kUnboundedPopulation = std::int64_t{1} << 50;

void require(bool ok, const char* code, const char* message) {
  if (!ok) throw Error(code, message);
}

void check_common(const BatchValidationInput& in, std::size_t budget_parts) {
  require(in.pair != nullptr, "invalid-input", "network pair missing");
  require(in.m_hat_holdout != nullptr, "invalid-input", "holdout match set missing");
  require(in.k_y >= 1, "invalid-ky", "k_y must be at least 1");
  if (in.budget.size() != budget_parts) {
    throw Error("budget-mismatch", "expected " + std::to_string(budget_parts) + " delta parts, got " +
                                       std::to_string(in.budget.size()));
  }
  in.budget.validate();
}

std::string digest_of(const BatchValidationInput& in) {
  Digest d;
  d.add(std::uint64_t{in.pair->x_net().node_count()}).add(std::uint64_t{in.pair->y_net().node_count()});
  for (const auto& [x, y] : in.m_hat_holdout->pairs()) d.add(std::uint64_t{x}).add(std::uint64_t{y});
  d.add("complete");
  if (in.m_hat_complete) {
    for (const auto& [x, y] : in.m_hat_complete->pairs()) d.add(std::uint64_t{x}).add(std::uint64_t{y});
  }
  d.add("s_m");
  for (const auto& [x, y] : in.s_m) d.add(std::uint64_t{x}).add(std::uint64_t{y});
  d.add("s_x");
  for (NodeIndex x : in.s_x) {
    d.add(std::uint64_t{x});
    if (in.s_x_actual) d.add(std::uint64_t{in.s_x_actual->matches_of(x).size()});
  }
  d.add(std::uint64_t{in.k_y}).add(to_string(in.method));
  if (in.m_size) d.add(static_cast<std::uint64_t>(in.m_size->n)).add(std::uint64_t{in.m_size->exact});
  for (double p : in.budget.parts()) d.add(p);
  return d.hex();
}

ValidationReport start_report(const BatchValidationInput& in, std::string theorem, Quantity q,
                              Variant v) {
  ValidationReport r;
  r.theorem = std::move(theorem);
  r.quantity = q;
  r.variant = v;
  r.side = Side::lower;
  r.budget = in.budget;
  r.inputs_digest = digest_of(in);
  return r;
}

// p-(M, S_M, 1{M_H}, 0, 1, delta)
double recall_term(const BatchValidationInput& in, Confidence delta, ValidationReport& report) {
  require(!in.s_m.empty(), "empty-sample", "S_M is empty");
  std::vector<double> hits;
  hits.reserve(in.s_m.size());
  for (const auto& [x, y] : in.s_m) hits.push_back(in.m_hat_holdout->contains(x, y) ? 1.0 : 0.0);
  PopulationSize size{kUnboundedPopulation, false};
  if (in.m_size) size = *in.m_size;
  if (size.n < static_cast<std::int64_t>(in.s_m.size())) {
    throw Error("invalid-sample-size", "|S_M| exceeds the supplied |M|");
  }
  return detail::bound_term({"recall_term", hits, PopulationSpec{size.n, 0.0, 1.0}, Side::lower,
                             delta, size.exact},
                            in.method, report);
}

// p-(X, S_X, m, 0, k_y, delta), a lower bound on |M| / |X|.
double density_term(const BatchValidationInput& in, Confidence delta, ValidationReport& report) {
  require(!in.s_x.empty(), "empty-sample", "S_X is empty");
  require(in.s_x_actual != nullptr, "invalid-input", "actual matches for S_X missing");
  std::vector<double> counts;
  counts.reserve(in.s_x.size());
  for (NodeIndex x : in.s_x) {
    const std::size_t m = in.s_x_actual->matches_of(x).size();
    if (m > in.k_y) {
      throw Error("ky-violated", "m(x)=" + std::to_string(m) + " exceeds k_y=" + std::to_string(in.k_y));
    }
    counts.push_back(static_cast<double>(m));
  }
  const auto n = static_cast<std::int64_t>(in.pair->x_net().node_count());
  return detail::bound_term({"match_density_term", counts,
                             PopulationSpec{n, 0.0, static_cast<double>(in.k_y)}, Side::lower,
                             delta, true},
                            in.method, report);
}

double precision_product(std::size_t x_count, std::size_t identified, double recall,
                         double density) {
  return static_cast<double>(x_count) / static_cast<double>(identified) * recall * density;
}

}  // namespace

ValidationReport holdout_batch_recall(const BatchValidationInput& in) {
  check_common(in, 1);
  auto report = start_report(in, "holdout-batch-recall", Quantity::recall, Variant::holdout);
  report.bound = std::clamp(recall_term(in, in.budget.part(0), report), 0.0, 1.0);
  return report;
}

ValidationReport holdout_batch_precision(const BatchValidationInput& in) {
  check_common(in, 2);
  const std::size_t identified = in.m_hat_holdout->size();
  require(identified > 0, "no-identified-matches", "holdout match set is empty");
  auto report = start_report(in, "holdout-batch-precision", Quantity::precision, Variant::holdout);
  const double recall = recall_term(in, in.budget.part(0), report);
  const double density = density_term(in, in.budget.part(1), report);
  report.terms["identified_count"] = static_cast<double>(identified);
  report.terms["x_count"] = static_cast<double>(in.pair->x_net().node_count());
  const double raw = precision_product(in.pair->x_net().node_count(), identified, recall, density);
  report.bound = std::clamp(raw, 0.0, 1.0);
  return report;
}

ValidationReport complete_batch_recall(const BatchValidationInput& in) {
  check_common(in, 2);
  require(in.m_hat_complete != nullptr, "missing-complete", "complete match set missing");
  auto report = start_report(in, "complete-batch-recall", Quantity::recall, Variant::complete);
  const double recall = recall_term(in, in.budget.part(0), report);
  const std::size_t disagreement = in.m_hat_holdout->difference_size(*in.m_hat_complete);
  report.terms["disagreement_count"] = static_cast<double>(disagreement);
  if (disagreement == 0) {
    report.bound = std::clamp(recall, 0.0, 1.0);
    return report;
  }
  const double density = density_term(in, in.budget.part(1), report);
  const double denominator = static_cast<double>(in.pair->x_net().node_count()) * density;
  report.terms["actual_count_lower"] = denominator;
  if (!(density > in.denominator_floor) || denominator <= 0.0) {
    report.vacuous = true;
    report.flags.push_back(kFlagVacuous);
    report.bound = 0.0;
    return report;
  }
  const double subtracted = static_cast<double>(disagreement) / denominator;
  report.terms["disagreement_term"] = subtracted;
  report.bound = std::clamp(recall - subtracted, 0.0, 1.0);
  return report;
}

ValidationReport complete_batch_precision(const BatchValidationInput& in) {
  check_common(in, 2);
  require(in.m_hat_complete != nullptr, "missing-complete", "complete match set missing");
  const std::size_t identified = in.m_hat_complete->size();
  require(identified > 0, "no-identified-matches", "complete match set is empty");
  auto report = start_report(in, "complete-batch-precision", Quantity::precision, Variant::complete);
  const double recall = recall_term(in, in.budget.part(0), report);
  const double density = density_term(in, in.budget.part(1), report);
  const std::size_t disagreement = in.m_hat_holdout->difference_size(*in.m_hat_complete);
  report.terms["identified_count"] = static_cast<double>(identified);
  report.terms["x_count"] = static_cast<double>(in.pair->x_net().node_count());
  report.terms["disagreement_count"] = static_cast<double>(disagreement);
  const double subtracted = static_cast<double>(disagreement) / static_cast<double>(identified);
  report.terms["disagreement_term"] = subtracted;
  const double raw =
      precision_product(in.pair->x_net().node_count(), identified, recall, density) - subtracted;
  report.bound = std::clamp(raw, 0.0, 1.0);
  return report;
}

BatchMetrics true_batch_metrics(const MatchSet& m_hat, const MatchSet& m_true) {
  BatchMetrics out;
  const auto both = static_cast<double>(m_hat.intersection_size(m_true));
  if (!m_hat.empty()) out.precision = both / static_cast<double>(m_hat.size());
  if (!m_true.empty()) out.recall = both / static_cast<double>(m_true.size());
  return out;
}

std::vector<MatchSet> partition_by_score(const ScoredMatches& scored,
                                         std::span<const double> thresholds) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw Error("invalid-thresholds", "score thresholds must be ascending");
  }
  const MatchSet& all = scored.matches;
  std::vector<MatchSet> bands(thresholds.size() + 1,
                              MatchSet(all.x_count(), all.y_count(), all.role(), all.forbids_identity()));
  for (const auto& [p, score] : scored.scores) {
    const auto band = static_cast<std::size_t>(
        std::upper_bound(thresholds.begin(), thresholds.end(), score) - thresholds.begin());
    bands[band].insert(p.first, p.second);
  }
  return bands;
}

SimultaneousReport simultaneous_batch_recall(const BatchValidationInput& in,
                                             std::span<const MatchSet> bands) {
  if (in.budget.size() != bands.size()) {
    throw Error("budget-mismatch", "one delta part per band required");
  }
  in.budget.validate();
  std::vector<ValidationReport> reports;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    BatchValidationInput part = in;
    part.m_hat_holdout = &bands[i];
    part.budget = DeltaBudget({in.budget.parts()[i]});
    auto report = holdout_batch_recall(part);
    report.terms["band"] = static_cast<double>(i);
    reports.push_back(std::move(report));
  }
  return simultaneous(std::move(reports));
}

}  // namespace matchcert
