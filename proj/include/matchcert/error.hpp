#pragma once

#include <stdexcept>
#include <string>

namespace matchcert {

/// Exception carrying a stable machine-readable code (e.g. "empty-sample")
/// next to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)), message_(message) {}

  explicit Error(std::string code) : std::runtime_error(code), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string code_;
  std::string message_;
};

}  // namespace matchcert
