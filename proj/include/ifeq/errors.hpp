#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ifeq {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Syntax error while parsing an expression. Carries the byte offset of the
/// first offending character and the set of tokens that were expected there.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& expected)
      : Error("syntax error at byte " + std::to_string(offset) + ": expected " + expected),
        offset_(offset),
        expected_(expected) {}

  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 protected:
  ParseError(std::size_t offset, const std::string& expected, const std::string& msg)
      : Error(msg), offset_(offset), expected_(expected) {}

 private:
  std::size_t offset_;
  std::string expected_;
};

/// An identifier that is neither `x` nor a known function name.
class UnknownIdentifierError : public ParseError {
 public:
  UnknownIdentifierError(std::size_t offset, const std::string& name)
      : ParseError(offset, "'x' or a function name",
                   "unknown identifier '" + name + "' at byte " + std::to_string(offset)),
        name_(name) {}

  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Expression evaluation left the real domain (log of a non-positive value,
/// division by zero, sqrt of a negative value) or produced a non-finite value.
class EvalDomainError : public Error {
 public:
  using Error::Error;
};

/// Differentiation was requested through a node with no derivative (abs).
class NonDifferentiableError : public Error {
 public:
  using Error::Error;
};

/// A configuration contract was violated (derivative floor not met on the
/// probe grid, malformed problem file, inadmissible seed, bad step size...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bracket expansion in the monotone inverter did not straddle the target
/// after the doubling budget. Signals a forward map violating its floor.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// One of the standing hypotheses (K > 1, alpha > 0, beta > 0, sup|g| finite)
/// does not hold.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

/// beta fails the case-dependent admissibility bound of the solvability test.
class BetaTooLarge : public Error {
 public:
  BetaTooLarge(const std::string& which_case, double bound, double beta)
      : Error("beta = " + std::to_string(beta) + " is not below the " + which_case +
              " bound " + std::to_string(bound)),
        bound_(bound),
        beta_(beta) {}

  double bound() const { return bound_; }
  double beta() const { return beta_; }

 private:
  double bound_;
  double beta_;
};

/// Explicitly requested (L, rho) fall outside the admissible windows.
class ExplicitOutOfWindow : public Error {
 public:
  using Error::Error;
};

/// Probing suggests sup|g| is not finite (estimate keeps growing as the
/// probe window doubles).
class UnboundedFunctionError : public Error {
 public:
  using Error::Error;
};

/// An iterate escaped its function class beyond the tolerated slack;
/// the discretization is too coarse for the configured (L, rho).
class MembershipDrift : public Error {
 public:
  using Error::Error;
};

/// The iteration trace is too short for the requested diagnostic.
class InsufficientTrace : public Error {
 public:
  using Error::Error;
};

/// Missing or unreadable artifact of a prior run.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

/// A condition the theory guarantees was violated; indicates a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ifeq
