#pragma once

#include <stdexcept>
#include <string>

namespace qcw {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A body has too few samples to define the requested measurement.
class DegenerateBody : public Error {
 public:
  using Error::Error;
};

/// A sample, ball or body is not inside the set it is required to lie in.
class ContainmentViolation : public Error {
 public:
  using Error::Error;
};

/// The distance oracle returned a value inconsistent with a previous check.
class InconsistentOracle : public Error {
 public:
  using Error::Error;
};

/// A map was evaluated outside its domain of definition.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

class InvalidRing : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Constant evaluated outside the parameter range where it is defined.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qcw
