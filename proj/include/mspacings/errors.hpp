#pragma once

#include <stdexcept>
#include <string>

namespace mspacings {

// Base class for all library failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument violates an operation's precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input data cannot be used as-is (ties, values outside a declared interval).
class DataError : public Error {
 public:
  using Error::Error;
};

// An iterative numerical routine failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace mspacings
