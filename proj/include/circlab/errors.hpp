#pragma once

#include <stdexcept>
#include <string>

namespace circlab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function (negative x for I0,
// tau == 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent model or experiment parameters (K > N, trials == 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// The request is well-formed but exceeds a configured exact-search or
// enumeration limit.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed to converge or to bracket a root.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed input file or config text.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace circlab
