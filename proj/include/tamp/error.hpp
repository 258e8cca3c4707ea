#pragma once

#include <stdexcept>
#include <string>

namespace tamp {

// Malformed input: bad indices, shape mismatches, unparsable text.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input is well formed but violates an operation's precondition
// (e.g. asking for the cycles of a non-cactus).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Enumeration caps (vertex count, half-edges, degree) exceeded.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Estimated floating-point work exceeds the configured budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An AMP iterate became non-finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int iteration, long index)
      : std::runtime_error("iterate diverged at t=" + std::to_string(iteration) +
                           ", i=" + std::to_string(index)),
        iteration(iteration),
        index(index) {}
  int iteration;
  long index;
};

}  // namespace tamp
