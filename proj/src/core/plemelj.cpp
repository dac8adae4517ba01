#include "specdet/plemelj.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "specdet/errors.hpp"

namespace specdet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Complex checked_trace(const TracePowerSource& src, int m) {
  const Complex t = src.trace_power(m);
  if (!is_finite(t)) {
    throw EvaluationError("trace power of order " + std::to_string(m) + " is not finite" +
                          (src.label.empty() ? std::string() : " (source '" + src.label + "')"));
  }
  return t;
}

}  // namespace

DetResult plemelj_det(const TracePowerSource& src, Complex lambda, int order, double tol) {
  if (order < 1) throw ParameterError("series order must be >= 1, got " + std::to_string(order));
  if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
  if (!is_finite(lambda)) throw ParameterError("lambda must be finite");

  DetResult out;
  out.terms.reserve(static_cast<std::size_t>(order));
  Complex sum = 0.0;
  Complex lambda_pow = 1.0;
  int small_run = 0;
  bool hint_warned = false;

  for (int m = 1; m <= order; ++m) {
    const Complex tr = checked_trace(src, m);
    if (src.norm_hint && !hint_warned) {
      const double bound = std::pow(*src.norm_hint, m) * (1.0 + 1e-9);
      if (std::abs(tr) > bound) {
        out.warnings.push_back("norm hint " + std::to_string(*src.norm_hint) + " violated at order " +
                               std::to_string(m));
        hint_warned = true;
      }
    }
    lambda_pow *= lambda;
    const double sign = (m % 2 == 1) ? 1.0 : -1.0;
    const Complex term = (sign / m) * lambda_pow * tr;
    out.terms.push_back(term);
    sum += term;
    if (std::abs(term) < tol * std::max(1.0, std::abs(sum))) {
      if (++small_run == 3) break;
    } else {
      small_run = 0;
    }
  }

  out.order_used = static_cast<int>(out.terms.size());
  out.value = std::exp(sum);

  const double last = std::abs(out.terms.back());
  const bool small = last <= tol * std::max(1.0, std::abs(sum));
  if (last == 0.0) {
    out.tail_estimate = 0.0;
    out.converged = true;
  } else if (out.terms.size() >= 2 && std::abs(out.terms[out.terms.size() - 2]) > 0.0) {
    const double rho = last / std::abs(out.terms[out.terms.size() - 2]);
    if (rho < 1.0) {
      out.tail_estimate = last * rho / (1.0 - rho);
      out.converged = small;
    } else {
      out.tail_estimate = kInf;
      out.converged = false;
    }
  } else {
    out.tail_estimate = kInf;
    out.converged = false;
  }
  return out;
}

double radius_estimate(const TracePowerSource& src, int order) {
  if (order < 3) throw ParameterError("radius_estimate needs order >= 3, got " + std::to_string(order));
  const int first = (order + 1) / 2;
  double growth = 0.0;
  // Traces are requested in increasing order from 1 so that cached sources
  // can advance incrementally.
  for (int m = 1; m <= order; ++m) {
    const Complex tr = checked_trace(src, m);
    if (m < first) continue;
    const double a = std::abs(tr);
    if (a > 0.0) growth = std::max(growth, std::pow(a, 1.0 / m));
  }
  return growth == 0.0 ? kInf : 1.0 / growth;
}

}  // namespace specdet
