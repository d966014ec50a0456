#pragma once

#include <stdexcept>
#include <string>

namespace nne {

/// Caller passed inputs that violate an operation's preconditions
/// (dimension mismatch, infeasible point, enumeration budget exceeded, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A subsolver could not produce a trustworthy answer.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The game's joint feasible set is empty.
class InfeasibleGameError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace nne
