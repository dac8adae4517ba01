#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace specdet {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions do not fit the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A kernel, symbol or trace source produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// Invalid numeric parameter (order, cutoff, tolerance, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A requested Fourier mode cannot be resolved on the sampling grid.
class AliasingError : public Error {
 public:
  using Error::Error;
};

// Unknown identifier (e.g. a dual-object block id).
class LookupError : public Error {
 public:
  using Error::Error;
};

// Inconsistent spectral model or symbol declaration.
class ModelError : public Error {
 public:
  using Error::Error;
};

// A brute-force computation refused to run because it is too large.
class FeasibilityError : public Error {
 public:
  FeasibilityError(const std::string& what, double count, double limit)
      : Error(what + " (count " + format_count(count) + " exceeds limit " + format_count(limit) + ")"),
        count_(count),
        limit_(limit) {}

  double count() const noexcept { return count_; }
  double limit() const noexcept { return limit_; }

 private:
  static std::string format_count(double v) {
    if (v < 9.0e15) return std::to_string(static_cast<std::int64_t>(v));
    return std::to_string(v);
  }

  double count_;
  double limit_;
};

}  // namespace specdet
