#pragma once

#include <stdexcept>
#include <string>

namespace batchq {

// Malformed input: bad parameters, invalid model descriptions, unparsable
// spec files. The CLI maps this to exit code 2.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (Ei at x <= 0,
// a steady state requested for a periodic rate, a degenerate service law).
// The CLI maps this to exit code 3.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class DegenerateServiceError : public DomainError {
public:
  using DomainError::DomainError;
};

class SingularSystemError : public DomainError {
public:
  using DomainError::DomainError;
};

class DegenerateDenominatorError : public DomainError {
public:
  using DomainError::DomainError;
};

// Simulator configuration that cannot be realised (routing capacity smaller
// than the batch support). The CLI maps this to exit code 4.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An internal numerical cross-check disagreed.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace batchq
