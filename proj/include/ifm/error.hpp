// error.hpp - exception types shared by the ifm library.
#pragma once

#include <stdexcept>
#include <string>

namespace ifm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree (e.g. a qubit unitary applied to a qutrit).
class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, int expected, int actual)
      : Error(what + ": expected dim " + std::to_string(expected) + ", got " +
              std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  int expected() const { return expected_; }
  int actual() const { return actual_; }

 private:
  int expected_;
  int actual_;
};

/// A precondition on an argument value was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace ifm
