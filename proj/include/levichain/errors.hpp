#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace levichain {

/// Thrown when an argument lies outside the domain of a formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// One failed invariant, located by a JSON pointer (e.g. "/sim/dt_s").
struct Violation {
  std::string path;
  std::string message;
};

/// Carries every violation found, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : std::runtime_error(format(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string format(const std::vector<Violation>& violations) {
    std::string out = "validation failed (" + std::to_string(violations.size()) + " violation";
    out += violations.size() == 1 ? ")" : "s)";
    for (const auto& v : violations) {
      out += "\n  ";
      out += v.path.empty() ? "/" : v.path;
      out += ": ";
      out += v.message;
    }
    return out;
  }

  std::vector<Violation> violations_;
};

}  // namespace levichain
