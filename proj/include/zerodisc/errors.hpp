#pragma once

#include <stdexcept>
#include <string>

namespace zerodisc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or parameter lies outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input too small or degenerate for the requested statistic.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Derivative vanishes where a nonzero derivative is required.
class CriticalPointError : public Error {
 public:
  using Error::Error;
};

class InterpolationError : public Error {
 public:
  using Error::Error;
};

/// Built objects fail their own self-consistency checks.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Step-size underflow or non-finite state in the ODE integrator.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Argument-principle contour could not be placed away from zeros.
class ContourError : public Error {
 public:
  using Error::Error;
};

/// A quantity that must be (nearly) integral or converged is not.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

class BranchError : public Error {
 public:
  using Error::Error;
};

/// Run configuration outside its documented ranges.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A command declines to run because a hypothesis of the construction fails.
class RefusalError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document. `where` names the offending field or line.
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where), detail_(what) {}
  const std::string& where() const noexcept { return where_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string where_;
  std::string detail_;
};

}  // namespace zerodisc
