#pragma once

#include <stdexcept>
#include <string>

namespace pdstsp {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vertex index outside [0, 2n+1].
class InvalidVertex : public Error {
 public:
  using Error::Error;
};

/// A sequence that breaks repeat/endpoint/pairing/precedence structure.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An operation that requires a feasible route received an infeasible one.
class InfeasibleRoute : public Error {
 public:
  using Error::Error;
};

/// Instance too large for an enumerating routine.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration: unknown method token, bad JSON field, etc.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdstsp
