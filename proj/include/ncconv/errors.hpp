#ifndef NCCONV_ERRORS_HPP
#define NCCONV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ncconv {

// Base class for all library errors.
class NcError : public std::runtime_error {
 public:
  explicit NcError(const std::string& msg) : std::runtime_error(msg) {}
};

// A position or operation is incompatible with the measure's support domain.
class DomainError : public NcError {
 public:
  using NcError::NcError;
};

// Atom weights do not sum to one within tolerance.
class WeightSumError : public NcError {
 public:
  using NcError::NcError;
};

// A transform was evaluated too close to the support of the measure.
class PoleError : public NcError {
 public:
  using NcError::NcError;
};

// An iterative solver or extrapolation failed to reach its tolerance.
class ConvergenceError : public NcError {
 public:
  using NcError::NcError;
};

// An operation precondition (domain of definition, nonvanishing moment, ...)
// was violated.
class PreconditionError : public NcError {
 public:
  using NcError::NcError;
};

// A pointwise deconvolution has no solution in the upper half-plane.
class NoSolutionError : public NcError {
 public:
  using NcError::NcError;
};

// A matrix expected to be normal is not, within tolerance.
class NonNormalError : public NcError {
 public:
  using NcError::NcError;
};

// A matrix expected to be positive semidefinite has a negative eigenvalue.
class NotPSDError : public NcError {
 public:
  using NcError::NcError;
};

// Measure-expression syntax error with source location.
class ParseError : public NcError {
 public:
  ParseError(int line, int col, const std::string& msg)
      : NcError("parse error at " + std::to_string(line) + ":" +
                std::to_string(col) + ": " + msg),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

}  // namespace ncconv

#endif
