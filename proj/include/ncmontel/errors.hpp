#pragma once

#include <stdexcept>
#include <string>

namespace ncmontel {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent inputs (dimension mismatches, bad syntax, ...).
class InvalidInputError : public Error {
public:
  explicit InvalidInputError(const std::string& what) : Error(what) {}
};

/// A documented precondition of an operation was violated.
class PreconditionError : public Error {
public:
  explicit PreconditionError(const std::string& what) : Error(what) {}
};

/// The truncation dimension is too small for the requested construction.
/// Carries the minimum truncation that would have sufficed.
class CapacityError : public Error {
public:
  CapacityError(const std::string& what, int required_truncation)
      : Error(what), required_truncation_(required_truncation) {}

  int required_truncation() const { return required_truncation_; }

private:
  int required_truncation_;
};

}  // namespace ncmontel
