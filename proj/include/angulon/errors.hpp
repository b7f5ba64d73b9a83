#pragma once

#include <stdexcept>
#include <string>

namespace angulon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  using Error::Error;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& name)
      : Error("unknown variable '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// A denominator vanished at an evaluation point.
class PoleError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a computation would exceed its configured term budget.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// A polynomial could not be written in the reduced tau variables within the
/// per-variable degree bound.
class NotTauPolynomial : public Error {
 public:
  using Error::Error;
};

class CacheNotFound : public Error {
 public:
  using Error::Error;
};

class CacheParseError : public Error {
 public:
  CacheParseError(const std::string& what, std::size_t byte)
      : Error(what), byte_(byte) {}
  std::size_t byte() const noexcept { return byte_; }

 private:
  std::size_t byte_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace angulon
