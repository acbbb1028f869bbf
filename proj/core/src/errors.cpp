#include "pottslab/errors.hpp"

#include <cstdio>

namespace pottslab {

namespace {

std::string budget_message(const std::string& what, long double required, std::uint64_t budget) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s requires %.6Lg evaluations, budget is %llu", what.c_str(), required,
                static_cast<unsigned long long>(budget));
  return buf;
}

}  // namespace

BudgetExceeded::BudgetExceeded(const std::string& what_is_enumerated, long double required, std::uint64_t budget)
    : std::runtime_error(budget_message(what_is_enumerated, required, budget)), required_(required), budget_(budget) {}

}  // namespace pottslab
