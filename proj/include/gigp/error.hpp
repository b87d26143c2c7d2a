#pragma once

#include <stdexcept>
#include <string>

namespace gigp {

// Argument outside the mathematical domain of a function (z <= 0 for K_nu, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Parameter record rejected by validate().
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoSolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Too few points, bins or samples for a statistic to be defined.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gigp
