#include "matchcert/report.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>

namespace matchcert {

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::precision:
      return "precision";
    case Quantity::recall:
      return "recall";
    case Quantity::error_rate:
      return "error-rate";
  }
  return "unknown";
}

std::string_view to_string(Variant v) { return v == Variant::holdout ? "holdout" : "complete"; }

bool ValidationReport::has_flag(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json j;
  j["theorem"] = report.theorem;
  j["quantity"] = to_string(report.quantity);
  j["variant"] = to_string(report.variant);
  j["side"] = report.side == Side::upper ? "upper" : "lower";
  j["bound"] = report.bound;
  j["budget"] = report.budget.parts();
  j["failure_probability"] = report.failure_probability();
  j["terms"] = report.terms;
  j["term_methods"] = report.term_methods;
  j["flags"] = report.flags;
  j["vacuous"] = report.vacuous;
  j["inputs_digest"] = report.inputs_digest;
  return j;
}

SimultaneousReport simultaneous(std::vector<ValidationReport> reports) {
  std::vector<double> parts;
  for (const auto& r : reports) {
    parts.insert(parts.end(), r.budget.parts().begin(), r.budget.parts().end());
  }
  SimultaneousReport out;
  out.joint_confidence = union_confidence(DeltaBudget(std::move(parts)));
  out.reports = std::move(reports);
  return out;
}

nlohmann::json to_json(const SimultaneousReport& report) {
  nlohmann::json j;
  j["joint_confidence"] = report.joint_confidence;
  j["reports"] = nlohmann::json::array();
  for (const auto& r : report.reports) j["reports"].push_back(to_json(r));
  return j;
}

Digest& Digest::add(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 0x100000001b3ULL;
  }
  // Length separator keeps ("ab","c") and ("a","bc") apart.
  return add(static_cast<std::uint64_t>(bytes.size()) ^ std::uint64_t{0xff});
}

Digest& Digest::add(std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    state_ ^= (value >> (8 * i)) & 0xffU;
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

Digest& Digest::add(double value) { return add(std::bit_cast<std::uint64_t>(value)); }

std::string Digest::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

}  // namespace matchcert
