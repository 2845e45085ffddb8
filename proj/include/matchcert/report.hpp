#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchcert/bounds.hpp"

namespace matchcert {

enum class Quantity { precision, recall, error_rate };
enum class Variant { holdout, complete };

std::string_view to_string(Quantity q);
std::string_view to_string(Variant v);

// Report flags.
inline constexpr const char* kFlagVacuous = "vacuous-denominator";
inline constexpr const char* kFlagIdentical = "identical-matchers";
inline constexpr const char* kFlagDpWidened = "dp-range-widened";

/// Outcome of one precision / recall / error-rate certificate.
struct ValidationReport {
  std::string theorem;
  Quantity quantity = Quantity::recall;
  Variant variant = Variant::holdout;
  Side side = Side::lower;  // upper for error rates
  double bound = 0.0;       // clamped to [0, 1]
  DeltaBudget budget;
  std::map<std::string, double> terms;
  std::map<std::string, std::string> term_methods;
  std::vector<std::string> flags;
  bool vacuous = false;
  std::string inputs_digest;

  double failure_probability() const { return budget.total(); }
  bool has_flag(std::string_view flag) const;
};

nlohmann::json to_json(const ValidationReport& report);

/// Several certificates that hold together by the union bound.
struct SimultaneousReport {
  std::vector<ValidationReport> reports;
  double joint_confidence = 0.0;
};

SimultaneousReport simultaneous(std::vector<ValidationReport> reports);
nlohmann::json to_json(const SimultaneousReport& report);

/// FNV-1a 64 over a canonical byte stream; used for input provenance.
class Digest {
 public:
  Digest& add(std::string_view bytes);
  Digest& add(std::uint64_t value);
  Digest& add(double value);
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace matchcert
