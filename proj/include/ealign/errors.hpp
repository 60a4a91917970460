#pragma once

#include <stdexcept>
#include <string>

namespace ealign {

/// Argument outside the mathematical domain of an operation (e.g. r <= 0 for a kernel).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid setup: bad grid size, mismatched lengths, malformed config values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bad initial data (negative density and the like).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// g(k) requested at a k whose level set carries kernel mass >= C0.
class InadmissibleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// State cannot be processed, e.g. zero total mass.
class DegenerateStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested time step violates the CFL restriction.
class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integration gave up (step size fell below its floor) or an internal
/// cross-check between two numerical routes failed.
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ealign
