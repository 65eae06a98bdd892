#pragma once

#include <stdexcept>
#include <string>

namespace opcert {

/// Malformed or inconsistent input (bad shapes, dependent bases, unknown names).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A documented precondition of an operation does not hold for the given input.
class PreconditionError : public std::logic_error {
 public:
  explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

/// The numerical solver produced a non-finite value.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace opcert
