#include "specdet/cmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "specdet/errors.hpp"

namespace specdet {

bool is_finite(Complex z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows_ * cols_ != data_.size()) {
    throw ShapeError("matrix of shape " + std::to_string(rows_) + "x" + std::to_string(cols_) + " given " +
                     std::to_string(data_.size()) + " entries");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!is_finite(data_[k])) {
      throw EvaluationError("non-finite matrix entry at (" + std::to_string(k / cols_) + "," +
                            std::to_string(k % cols_) + ")");
    }
  }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  std::vector<Complex> data;
  std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
  for (const auto& r : rows) {
    if (r.size() != cols) throw ShapeError("ragged matrix literal");
    data.insert(data.end(), r.begin(), r.end());
  }
  *this = CMatrix(rows.size(), cols, std::move(data));
}

CMatrix CMatrix::zeros(std::size_t rows, std::size_t cols) {
  return CMatrix(rows, cols, std::vector<Complex>(rows * cols));
}

CMatrix CMatrix::identity(std::size_t n) {
  std::vector<Complex> data(n * n);
  for (std::size_t i = 0; i < n; ++i) data[i * n + i] = 1.0;
  return CMatrix(n, n, std::move(data));
}

CMatrix CMatrix::diagonal(std::span<const Complex> diag) {
  const std::size_t n = diag.size();
  std::vector<Complex> data(n * n);
  for (std::size_t i = 0; i < n; ++i) data[i * n + i] = diag[i];
  return CMatrix(n, n, std::move(data));
}

CMatrix CMatrix::generate(std::size_t rows, std::size_t cols,
                          const std::function<Complex(std::size_t, std::size_t)>& f) {
  std::vector<Complex> data(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) data[i * cols + j] = f(i, j);
  return CMatrix(rows, cols, std::move(data));
}

CMatrix mat_mul(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("mat_mul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  const std::size_t n = a.rows(), inner = a.cols(), m = b.cols();
  std::vector<Complex> out(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < inner; ++k) acc += a(i, k) * b(k, j);
      out[i * m + j] = acc;
    }
  }
  return CMatrix(n, m, std::move(out));
}

CMatrix mat_add(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("mat_add: shape mismatch");
  std::vector<Complex> out(a.entries().begin(), a.entries().end());
  auto be = b.entries();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += be[k];
  return CMatrix(a.rows(), a.cols(), std::move(out));
}

CMatrix mat_scale(const CMatrix& a, Complex s) {
  std::vector<Complex> out(a.entries().begin(), a.entries().end());
  for (auto& z : out) z *= s;
  return CMatrix(a.rows(), a.cols(), std::move(out));
}

CMatrix identity_plus(const CMatrix& a, Complex s) {
  if (!a.is_square()) throw ShapeError("identity_plus: matrix is not square");
  std::vector<Complex> out(a.entries().begin(), a.entries().end());
  const std::size_t n = a.rows();
  for (auto& z : out) z *= s;
  for (std::size_t i = 0; i < n; ++i) out[i * n + i] += 1.0;
  return CMatrix(n, n, std::move(out));
}

CMatrix conjugate_transpose(const CMatrix& a) {
  return CMatrix::generate(a.cols(), a.rows(), [&](std::size_t i, std::size_t j) { return std::conj(a(j, i)); });
}

Complex trace(const CMatrix& m) {
  if (!m.is_square()) throw ShapeError("trace: matrix is not square");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) acc += m(i, i);
  return acc;
}

Complex lu_determinant(const CMatrix& m) {
  if (!m.is_square()) throw ShapeError("lu_determinant: matrix is not square");
  const std::size_t n = m.rows();
  if (n == 0) return 1.0;
  std::vector<Complex> a(m.entries().begin(), m.entries().end());
  Complex det = 1.0;
  bool odd = false;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      odd = !odd;
    }
    const Complex p = a[col * n + col];
    det *= p;
    for (std::size_t r = col + 1; r < n; ++r) {
      const Complex f = a[r * n + col] / p;
      if (f == 0.0) continue;
      for (std::size_t c = col + 1; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
    }
  }
  return odd ? -det : det;
}

CMatrix mat_power(const CMatrix& m, int p) {
  if (!m.is_square()) throw ShapeError("mat_power: matrix is not square");
  if (p < 0) throw ParameterError("mat_power: negative exponent");
  CMatrix acc = CMatrix::identity(m.rows());
  for (int s = 0; s < p; ++s) acc = mat_mul(acc, m);
  return acc;
}

Complex mat_power_trace(const CMatrix& m, int p) {
  if (!m.is_square()) throw ShapeError("mat_power_trace: matrix is not square");
  if (p < 1) throw ParameterError("mat_power_trace: exponent must be >= 1, got " + std::to_string(p));
  if (p == 1) return trace(m);
  CMatrix acc = m;
  for (int s = 1; s < p; ++s) acc = mat_mul(acc, m);
  return trace(acc);
}

double max_abs(const CMatrix& m) noexcept {
  double best = 0.0;
  for (const auto& z : m.entries()) best = std::max(best, std::abs(z));
  return best;
}

}  // namespace specdet
