#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pottslab {

/// Raised when a constructor or operation receives an out-of-range argument.
/// `field()` names the offending parameter (e.g. "p", "q", "d").
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// An exhaustive enumeration would exceed its configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what_is_enumerated, long double required, std::uint64_t budget);

  long double required() const noexcept { return required_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  long double required_;
  std::uint64_t budget_;
};

/// A map was evaluated outside the region where its denominator is positive.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace pottslab
