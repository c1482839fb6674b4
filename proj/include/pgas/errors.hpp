#pragma once

#include <stdexcept>
#include <string>

namespace pgas {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Coordinate index outside [0, n).
class IndexError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside dom(g_i); the subdifferential there is empty.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters, step sizes or solver settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The solution violates strict complementarity (delta <= 0) or sits on a kink
/// it should avoid.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Malformed or mismatched instance/report files.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine hit its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A candidate solution failed the first-order optimality check.
class OptimalityError : public Error {
 public:
  using Error::Error;
};

}  // namespace pgas
