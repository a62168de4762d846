#pragma once

#include <stdexcept>
#include <string>

namespace allab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad specs: invalid parameter ranges, unknown config keys, dimension mismatches.
struct ConfigError : Error {
  using Error::Error;
};

// An operation needs more labeled data than the set provides (e.g. k-NN with |S| < k).
struct InsufficientDataError : Error {
  using Error::Error;
};

// Degenerate geometry, e.g. duplicate coordinates in a 1D partition.
struct DegenerateInputError : Error {
  using Error::Error;
};

// The pool has no unqueried point left; indicates a misconfigured n/m ratio.
struct ExhaustionError : Error {
  using Error::Error;
};

// Combinatorial search would exceed its evaluation budget.
struct BudgetError : Error {
  using Error::Error;
};

// Rejection sampling accepted too rarely to estimate a conditional expectation.
struct ConditioningError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct UnsupportedError : Error {
  using Error::Error;
};

}  // namespace allab
