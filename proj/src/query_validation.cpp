#include "matchcert/query_validation.hpp"

#include <algorithm>

#include "matchcert/error.hpp"
#include "terms.hpp"

namespace matchcert {

namespace {

std::size_t common_count(const std::vector<NodeIndex>& a, const std::vector<NodeIndex>& b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

// Views gathered from the matchers and, for S_X only, from the ground truth.
struct Observations {
  std::vector<PerNodeView> sx_holdout;
  std::vector<PerNodeView> sx_actual;
  std::vector<PerNodeView> sx_complete;
  std::vector<PerNodeView> sxp_holdout;
  std::vector<PerNodeView> sxp_complete;
};

void check_input(const QueryValidationInput& in, std::size_t budget_parts, bool needs_complete) {
  if (!in.pair || !in.holdout) throw Error("invalid-input", "network pair and holdout matcher required");
  if (in.k_cap < 1) throw Error("invalid-input", "k_cap must be at least 1");
  if (needs_complete && !in.complete && !in.complete_identical) {
    throw Error("missing-complete", "complete matcher missing");
  }
  if (in.budget.size() != budget_parts) {
    throw Error("budget-mismatch", "expected " + std::to_string(budget_parts) + " delta parts, got " +
                                       std::to_string(in.budget.size()));
  }
  in.budget.validate();
}

void observe_validation(const QueryValidationInput& in, bool with_complete, Observations& obs) {
  if (in.s_x.empty()) throw Error("empty-sample", "S_X is empty");
  if (!in.truth) throw Error("invalid-input", "ground truth for S_X missing");
  for (NodeIndex x : in.s_x) {
    obs.sx_holdout.push_back(in.holdout->query(x));
    obs.sx_actual.push_back(in.truth->actual(x));
    if (with_complete) obs.sx_complete.push_back(in.complete->query(x));
  }
}

void observe_disagreement(const QueryValidationInput& in, Observations& obs) {
  if (in.s_x_prime.empty()) throw Error("empty-sample", "S'_X is empty");
  for (NodeIndex x : in.s_x_prime) {
    obs.sxp_holdout.push_back(in.holdout->query(x));
    obs.sxp_complete.push_back(in.complete->query(x));
  }
}

PopulationSpec x_population(const QueryValidationInput& in, double lo = 0.0, double hi = 1.0) {
  return PopulationSpec{static_cast<std::int64_t>(in.pair->x_net().node_count()), lo, hi};
}

std::string digest_of(const QueryValidationInput& in) {
  Digest d;
  d.add(std::uint64_t{in.pair->x_net().node_count()}).add(std::uint64_t{in.pair->y_net().node_count()});
  d.add("s_x");
  for (NodeIndex x : in.s_x) d.add(std::uint64_t{x});
  d.add("s_x_prime");
  for (NodeIndex x : in.s_x_prime) d.add(std::uint64_t{x});
  d.add(std::uint64_t{in.k_cap}).add(to_string(in.method)).add(std::uint64_t{in.complete_identical});
  for (double p : in.budget.parts()) d.add(p);
  return d.hex();
}

ValidationReport start_report(const QueryValidationInput& in, std::string theorem, Quantity q,
                              Variant v, Side side) {
  ValidationReport r;
  r.theorem = std::move(theorem);
  r.quantity = q;
  r.variant = v;
  r.side = side;
  r.budget = in.budget;
  r.inputs_digest = digest_of(in);
  return r;
}

// The node-subset populations are only bounded by |X|; that bound is used
// for every method, including hypergeometric inversion.
double holdout_precision_term(const QueryValidationInput& in, const Observations& obs,
                              Confidence delta, ValidationReport& report) {
  std::vector<double> values;
  for (std::size_t i = 0; i < in.s_x.size(); ++i) {
    if (auto p = single_node_precision(obs.sx_holdout[i], obs.sx_actual[i])) values.push_back(*p);
  }
  if (values.empty()) throw Error("no-usable-sample", "no sampled node has identified matches");
  return detail::bound_term({"holdout_precision_term", values, x_population(in), Side::lower, delta, true},
                            in.method, report);
}

double holdout_recall_term(const QueryValidationInput& in, const Observations& obs, Confidence delta,
                           ValidationReport& report) {
  std::vector<double> values;
  for (std::size_t i = 0; i < in.s_x.size(); ++i) {
    if (auto r = single_node_recall(obs.sx_holdout[i], obs.sx_actual[i])) values.push_back(*r);
  }
  if (values.empty()) throw Error("no-usable-sample", "no sampled node has actual matches");
  return detail::bound_term({"holdout_recall_term", values, x_population(in), Side::lower, delta, true},
                            in.method, report);
}

double holdout_error_term(const QueryValidationInput& in, const Observations& obs, Confidence delta,
                          ValidationReport& report) {
  std::vector<double> values;
  for (std::size_t i = 0; i < in.s_x.size(); ++i) {
    values.push_back(single_node_error(obs.sx_holdout[i], obs.sx_actual[i]));
  }
  return detail::bound_term({"holdout_error_term", values, x_population(in), Side::upper, delta, true},
                            in.method, report);
}

void mark_identical(ValidationReport& report) { report.flags.push_back(kFlagIdentical); }

void mark_vacuous(ValidationReport& report) {
  report.vacuous = true;
  report.flags.push_back(kFlagVacuous);
  report.bound = 0.0;
}

}  // namespace

std::optional<double> single_node_precision(const PerNodeView& identified, const PerNodeView& actual) {
  if (identified.matched.empty()) return std::nullopt;
  return static_cast<double>(common_count(identified.matched, actual.matched)) /
         static_cast<double>(identified.matched.size());
}

std::optional<double> single_node_recall(const PerNodeView& identified, const PerNodeView& actual) {
  if (actual.matched.empty()) return std::nullopt;
  return static_cast<double>(common_count(identified.matched, actual.matched)) /
         static_cast<double>(actual.matched.size());
}

int single_node_error(const PerNodeView& identified, const PerNodeView& actual) {
  return identified.matched == actual.matched ? 0 : 1;
}

int recall_disagreement(const PerNodeView& holdout, const PerNodeView& complete) {
  return common_count(holdout.matched, complete.matched) < holdout.matched.size() ? 1 : 0;
}

double precision_disagreement(const PerNodeView& holdout, const PerNodeView& complete) {
  if (holdout.matched.empty()) return 0.0;
  if (complete.matched.empty()) return 1.0;
  if (holdout.matched == complete.matched) return 0.0;
  const std::size_t holdout_only = holdout.matched.size() - common_count(holdout.matched, complete.matched);
  return 1.0 + static_cast<double>(holdout_only) / static_cast<double>(complete.matched.size());
}

std::pair<ValidationReport, ValidationReport> holdout_query_bounds(const QueryValidationInput& in) {
  check_input(in, 2, false);
  Observations obs;
  observe_validation(in, false, obs);
  auto precision = start_report(in, "holdout-query-precision", Quantity::precision, Variant::holdout,
                                Side::lower);
  precision.budget = DeltaBudget({in.budget.parts()[0]});
  precision.bound = std::clamp(holdout_precision_term(in, obs, in.budget.part(0), precision), 0.0, 1.0);
  auto recall = start_report(in, "holdout-query-recall", Quantity::recall, Variant::holdout, Side::lower);
  recall.budget = DeltaBudget({in.budget.parts()[1]});
  recall.bound = std::clamp(holdout_recall_term(in, obs, in.budget.part(1), recall), 0.0, 1.0);
  return {std::move(precision), std::move(recall)};
}

ValidationReport complete_query_recall(const QueryValidationInput& in) {
  check_input(in, 3, true);
  auto report = start_report(in, "complete-query-recall", Quantity::recall, Variant::complete, Side::lower);
  Observations obs;
  observe_validation(in, false, obs);
  const double holdout_recall = holdout_recall_term(in, obs, in.budget.part(0), report);
  if (in.complete_identical) {
    mark_identical(report);
    report.bound = std::clamp(holdout_recall, 0.0, 1.0);
    return report;
  }
  observe_disagreement(in, obs);
  std::vector<double> d_r;
  for (std::size_t i = 0; i < in.s_x_prime.size(); ++i) {
    d_r.push_back(recall_disagreement(obs.sxp_holdout[i], obs.sxp_complete[i]));
  }
  const double disagreement = detail::bound_term(
      {"recall_disagreement_term", d_r, x_population(in), Side::upper, in.budget.part(1), true}, in.method,
      report);
  std::vector<double> has_actual;
  for (const auto& view : obs.sx_actual) has_actual.push_back(view.matched.empty() ? 0.0 : 1.0);
  const double actual_fraction = detail::bound_term(
      {"actual_fraction_term", has_actual, x_population(in), Side::lower, in.budget.part(2), true},
      in.method, report);
  if (disagreement == 0.0) {
    report.bound = std::clamp(holdout_recall, 0.0, 1.0);
    return report;
  }
  if (actual_fraction <= 0.0) {
    mark_vacuous(report);
    return report;
  }
  report.terms["disagreement_ratio"] = disagreement / actual_fraction;
  report.bound = std::clamp(holdout_recall - disagreement / actual_fraction, 0.0, 1.0);
  return report;
}

ValidationReport complete_query_precision(const QueryValidationInput& in) {
  check_input(in, 4, true);
  auto report =
      start_report(in, "complete-query-precision", Quantity::precision, Variant::complete, Side::lower);
  Observations obs;
  observe_validation(in, false, obs);
  const double holdout_precision = holdout_precision_term(in, obs, in.budget.part(1), report);
  if (in.complete_identical) {
    mark_identical(report);
    report.bound = std::clamp(holdout_precision, 0.0, 1.0);
    return report;
  }
  observe_disagreement(in, obs);
  std::vector<double> holdout_nonempty;
  std::vector<double> complete_nonempty;
  std::vector<double> d_p;
  double max_dp = 0.0;
  for (std::size_t i = 0; i < in.s_x_prime.size(); ++i) {
    holdout_nonempty.push_back(obs.sxp_holdout[i].matched.empty() ? 0.0 : 1.0);
    complete_nonempty.push_back(obs.sxp_complete[i].matched.empty() ? 0.0 : 1.0);
    d_p.push_back(precision_disagreement(obs.sxp_holdout[i], obs.sxp_complete[i]));
    max_dp = std::max(max_dp, d_p.back());
  }
  const double cap = 1.0 + static_cast<double>(in.k_cap);
  if (max_dp > cap) {
    throw Error("k-cap-violated", "observed d_p " + std::to_string(max_dp) + " exceeds 1 + k_cap");
  }
  double lo = -1.0;
  double hi = 2.0;
  if (max_dp > hi) {
    lo = 0.0;
    hi = cap;
    report.flags.push_back(kFlagDpWidened);
  }
  report.terms["dp_range_lo"] = lo;
  report.terms["dp_range_hi"] = hi;

  const double holdout_fraction = detail::bound_term(
      {"holdout_fraction_term", holdout_nonempty, x_population(in), Side::lower, in.budget.part(0), true},
      in.method, report);
  const double disagreement = detail::bound_term(
      {"precision_disagreement_term", d_p, x_population(in, lo, hi), Side::upper, in.budget.part(2), true},
      in.method, report);
  const double complete_fraction = detail::bound_term(
      {"complete_fraction_term", complete_nonempty, x_population(in), Side::upper, in.budget.part(3), true},
      in.method, report);
  if (complete_fraction <= 0.0) {
    mark_vacuous(report);
    return report;
  }
  const double numerator = holdout_fraction * holdout_precision - disagreement;
  report.terms["numerator"] = numerator;
  report.bound = std::clamp(numerator / complete_fraction, 0.0, 1.0);
  return report;
}

ValidationReport holdout_error_rate(const QueryValidationInput& in) {
  check_input(in, 1, false);
  auto report = start_report(in, "holdout-error-rate", Quantity::error_rate, Variant::holdout, Side::upper);
  Observations obs;
  observe_validation(in, false, obs);
  report.bound = std::clamp(holdout_error_term(in, obs, in.budget.part(0), report), 0.0, 1.0);
  return report;
}

ValidationReport complete_error_rate(const QueryValidationInput& in) {
  check_input(in, 2, true);
  auto report = start_report(in, "complete-error-rate", Quantity::error_rate, Variant::complete, Side::upper);
  Observations obs;
  observe_validation(in, false, obs);
  const double holdout_error = holdout_error_term(in, obs, in.budget.part(0), report);
  if (in.complete_identical) {
    mark_identical(report);
    report.bound = std::clamp(holdout_error, 0.0, 1.0);
    return report;
  }
  observe_disagreement(in, obs);
  std::vector<double> differs;
  for (std::size_t i = 0; i < in.s_x_prime.size(); ++i) {
    differs.push_back(obs.sxp_holdout[i].matched == obs.sxp_complete[i].matched ? 0.0 : 1.0);
  }
  const double disagreement = detail::bound_term(
      {"error_disagreement_term", differs, x_population(in), Side::upper, in.budget.part(1), true},
      in.method, report);
  report.bound = std::clamp(holdout_error + disagreement, 0.0, 1.0);
  return report;
}

std::vector<PerNodeStats> compute_node_stats(const QueryValidationInput& in) {
  std::vector<PerNodeStats> out;
  const bool with_complete = in.complete != nullptr;
  for (NodeIndex x : in.s_x) {
    PerNodeStats s;
    s.node = x;
    const auto holdout = in.holdout->query(x);
    const auto actual = in.truth->actual(x);
    s.p = single_node_precision(holdout, actual);
    s.r = single_node_recall(holdout, actual);
    s.w = single_node_error(holdout, actual);
    if (with_complete) {
      const auto complete = in.complete->query(x);
      s.d_r = recall_disagreement(holdout, complete);
      s.d_p = precision_disagreement(holdout, complete);
    }
    out.push_back(std::move(s));
  }
  for (NodeIndex x : in.s_x_prime) {
    PerNodeStats s;
    s.node = x;
    s.validation_sample = false;
    if (with_complete) {
      const auto holdout = in.holdout->query(x);
      const auto complete = in.complete->query(x);
      s.d_r = recall_disagreement(holdout, complete);
      s.d_p = precision_disagreement(holdout, complete);
    }
    out.push_back(std::move(s));
  }
  return out;
}

nlohmann::json to_json(const PerNodeStats& stats, const NetworkPair& pair) {
  auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["node"] = pair.x_net().id(stats.node);
  j["sample"] = stats.validation_sample ? "S_X" : "S'_X";
  j["p"] = opt(stats.p);
  j["r"] = opt(stats.r);
  j["w"] = opt(stats.w);
  j["d_r"] = opt(stats.d_r);
  j["d_p"] = opt(stats.d_p);
  return j;
}

std::vector<NodeIndex> draw_until(SequentialSampler<NodeIndex>& sampler,
                                  const std::function<bool(NodeIndex)>& in_subset, std::size_t target) {
  std::size_t hits = 0;
  for (NodeIndex x : sampler.sample()) hits += in_subset(x) ? 1 : 0;
  while (hits < target && !sampler.exhausted()) hits += in_subset(sampler.next()) ? 1 : 0;
  const auto drawn = sampler.sample();
  return {drawn.begin(), drawn.end()};
}

QueryMetrics true_query_metrics(const MatchSet& identified, const MatchSet& actual) {
  QueryMetrics out;
  double p_sum = 0.0;
  double r_sum = 0.0;
  double w_sum = 0.0;
  std::size_t p_count = 0;
  std::size_t r_count = 0;
  const std::size_t n = identified.x_count();
  for (NodeIndex x = 0; x < n; ++x) {
    const auto m_hat = identified.view(x);
    const auto m = actual.view(x);
    if (auto p = single_node_precision(m_hat, m)) {
      p_sum += *p;
      ++p_count;
    }
    if (auto r = single_node_recall(m_hat, m)) {
      r_sum += *r;
      ++r_count;
    }
    w_sum += single_node_error(m_hat, m);
  }
  if (p_count > 0) out.precision = p_sum / static_cast<double>(p_count);
  if (r_count > 0) out.recall = r_sum / static_cast<double>(r_count);
  if (n > 0) out.error_rate = w_sum / static_cast<double>(n);
  return out;
}

}  // namespace matchcert
