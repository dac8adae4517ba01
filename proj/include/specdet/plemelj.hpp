#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specdet/cmatrix.hpp"

namespace specdet {

/// Outcome of a truncated Plemelj-Smithies evaluation of Det(I + lambda*T).
///
/// terms[m-1] holds t_m = ((-1)^(m+1)/m) * lambda^m * Tr(T^m) and
/// value == exp(sum of terms). cutoff_used records the spatial truncation of
/// the representation that produced the traces (box radius, block count,
/// spectral level), or 0 where none applies.
struct DetResult {
  Complex value{1.0, 0.0};
  std::vector<Complex> terms;
  int order_used = 0;
  long cutoff_used = 0;
  double tail_estimate = 0.0;  // +inf when the ratio test fails
  bool converged = false;
  std::vector<std::string> warnings;
};

/// A sequence m -> Tr(T^m), m = 1, 2, ... . Calls arrive in increasing m.
struct TracePowerSource {
  std::function<Complex(int)> trace_power;
  std::optional<double> norm_hint;
  std::string label;
};

/// Evaluates exp(sum_{m<=M} t_m). Stops early once three consecutive terms
/// are below tol * max(1, |partial sum|). Throws ParameterError for M < 1 or
/// tol <= 0, EvaluationError if a trace power is not finite.
DetResult plemelj_det(const TracePowerSource& src, Complex lambda, int order, double tol);

/// Root-test estimate of the series radius in lambda:
/// 1 / max_{ceil(M/2) <= m <= M} |Tr(T^m)|^(1/m). Returns +inf when every
/// sampled trace vanishes. Requires M >= 3.
double radius_estimate(const TracePowerSource& src, int order);

}  // namespace specdet
