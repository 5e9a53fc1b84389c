#pragma once

#include <stdexcept>
#include <string>

namespace thermo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad matrices, inadmissible words, bad configs.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A numerical procedure failed to reach its target.
class NumericalError : public Error {
public:
  using Error::Error;
};

class NotIrreducibleAperiodic : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class EmptyRowOrColumn : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class WordTooShort : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class SpecMismatch : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class BadFrequency : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class NoConvergence : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NormalizationFailed : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class BracketFailure : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class OutOfRange : public NumericalError {
public:
  OutOfRange(const std::string& what, double lo, double hi)
      : NumericalError(what), lo_(lo), hi_(hi) {}
  double lo() const { return lo_; }
  double hi() const { return hi_; }

private:
  double lo_;
  double hi_;
};

class LatticeDegenerate : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class QuadratureUnderresolved : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Enumeration guard tripped; callers may fall back to a cheaper path.
class TooLarge : public Error {
public:
  using Error::Error;
};

}  // namespace thermo
