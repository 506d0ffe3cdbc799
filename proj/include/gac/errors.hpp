#ifndef GAC_ERRORS_HPP
#define GAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration cap; carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// The principal eigenvalue of the subsolution ball is too large for R.
class GateError : public Error {
 public:
  using Error::Error;
};

/// A monotone-iteration ordering property failed beyond tolerance.
class OrderingError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw PreconditionError(msg);
}

}  // namespace gac

#endif  // GAC_ERRORS_HPP
