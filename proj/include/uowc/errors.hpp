#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uowc {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Violation {
  std::string field;
  std::string reason;
};

/// Thrown by parameter validation; carries every violated bound at once.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : std::invalid_argument(summarize(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

  bool names(const std::string& field) const {
    for (const auto& v : violations_) {
      if (v.field == field) return true;
    }
    return false;
  }

 private:
  static std::string summarize(const std::vector<Violation>& vs) {
    std::string out = "invalid parameters:";
    for (const auto& v : vs) out += " " + v.field + " (" + v.reason + ");";
    return out;
  }

  std::vector<Violation> violations_;
};

/// A bracketing root finder found no sign change.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// PAT power never falls to the offset-strategy level.
class NoCrossing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No feasible point exists for an optimization request.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace uowc
