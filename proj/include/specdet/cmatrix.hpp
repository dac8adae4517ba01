#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace specdet {

using Complex = std::complex<double>;

bool is_finite(Complex z) noexcept;

/// Dense complex matrix stored row-major. Immutable once constructed: every
/// operation below returns a fresh value.
class CMatrix {
 public:
  /// Throws ShapeError if rows*cols != entries.size(), EvaluationError if an
  /// entry is NaN or infinite.
  CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);
  CMatrix() = default;

  static CMatrix zeros(std::size_t rows, std::size_t cols);
  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const Complex> diag);
  static CMatrix generate(std::size_t rows, std::size_t cols,
                          const std::function<Complex(std::size_t, std::size_t)>& f);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Complex operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  std::span<const Complex> entries() const noexcept { return data_; }
  std::span<const Complex> row(std::size_t i) const noexcept {
    return std::span<const Complex>(data_).subspan(i * cols_, cols_);
  }

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Standard product. The inner sum runs over ascending k for every entry,
/// so the result is bit-reproducible for a given build.
CMatrix mat_mul(const CMatrix& a, const CMatrix& b);

CMatrix mat_add(const CMatrix& a, const CMatrix& b);
CMatrix mat_scale(const CMatrix& a, Complex s);
/// I + s*a.
CMatrix identity_plus(const CMatrix& a, Complex s);
CMatrix conjugate_transpose(const CMatrix& a);

Complex trace(const CMatrix& m);

/// Determinant by LU factorisation with partial pivoting on |.|; ties go to
/// the lowest row index. The 0x0 determinant is exactly 1.
Complex lu_determinant(const CMatrix& m);

/// Tr(m^p) for p >= 1, by repeated multiplication. p == 0 is rejected.
Complex mat_power_trace(const CMatrix& m, int p);

/// m^p for p >= 0.
CMatrix mat_power(const CMatrix& m, int p);

/// Largest entrywise modulus; 0 for an empty matrix.
double max_abs(const CMatrix& m) noexcept;

}  // namespace specdet
