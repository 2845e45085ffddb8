#pragma once

// Shared helper for assembling theorem bounds out of single-mean bounds.

#include <span>
#include <string>

#include "matchcert/bounds.hpp"
#include "matchcert/report.hpp"

namespace matchcert::detail {

struct TermRequest {
  std::string name;
  std::span<const double> values;
  PopulationSpec pop;
  Side side = Side::lower;
  Confidence delta{0.05};
  // False when pop.n is only an upper bound that hypergeometric inversion
  // must not rely on.
  bool exact_population = true;
};

/// Bounds one mean and records it in the report. A hypergeometric-exact
/// request falls back to empirical Bernstein-Serfling when the term is not a
/// 0/1 function on [0, 1] or its population size is not exact; the method
/// actually used is recorded in report.term_methods.
inline double bound_term(const TermRequest& req, BoundMethod requested, ValidationReport& report) {
  BoundMethod method = requested;
  if (method == BoundMethod::hypergeometric_exact &&
      (!req.exact_population || req.pop.lo != 0.0 || req.pop.hi != 1.0 || !is_binary(req.values))) {
    method = BoundMethod::empirical_bernstein_serfling;
  }
  const BoundResult result = bound_mean(req.pop, req.values, method, req.delta, req.side);
  const double value = req.side == Side::upper ? result.upper : result.lower;
  report.terms[req.name] = value;
  report.terms[req.name + ".estimate"] = result.estimate;
  report.terms[req.name + ".samples"] = static_cast<double>(req.values.size());
  report.term_methods[req.name] = std::string(to_string(method));
  return value;
}

}  // namespace matchcert::detail
