#pragma once

#include <stdexcept>
#include <string>

namespace groupr2 {

// Invalid argument outside an operation's stated domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Internal numeric failure (series cap hit, non-convergence, overflow).
// The message carries the offending arguments.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace groupr2
