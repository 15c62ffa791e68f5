#pragma once

#include <stdexcept>
#include <string>

namespace rbo {

// Violated precondition or malformed input.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values, runaway iterations, solver failures.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The footpoint iteration left the overflow guard. Carries the iteration at
// which it was detected.
class ProjectionDivergence : public NumericalError {
 public:
  ProjectionDivergence(int iteration, const std::string& what)
      : NumericalError(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace rbo
