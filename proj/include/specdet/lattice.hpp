#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specdet/cmatrix.hpp"
#include "specdet/plemelj.hpp"

namespace specdet {

/// A point of Z^n.
using Point = std::vector<long>;

long sup_norm(std::span<const long> p) noexcept;

/// Lexicographic enumeration of the box {p in Z^n : |p|_inf <= R}; the first
/// coordinate varies slowest.
class BoxIndex {
 public:
  BoxIndex(int dim, long cutoff);

  int dim() const noexcept { return dim_; }
  long cutoff() const noexcept { return cutoff_; }
  std::size_t size() const noexcept { return size_; }

  Point point(std::size_t idx) const;
  std::optional<std::size_t> index(std::span<const long> p) const;

 private:
  int dim_;
  long cutoff_;
  std::size_t side_;
  std::size_t size_;
};

/// Complex kernel K on Z^n x Z^n; K(i, j) = <T e_j, e_i>.
///
/// The optional row support lists, for a row i, every column j at which
/// K(i, j) may be nonzero (a superset is fine). Kernels without one are
/// scanned over the whole truncation box.
class LatticeKernel {
 public:
  using Eval = std::function<Complex(std::span<const long> i, std::span<const long> j)>;
  using RowSupport = std::function<std::vector<Point>(std::span<const long> i)>;

  LatticeKernel(int dim, Eval eval, std::optional<long> declared_support, std::string label,
                RowSupport row_support = {});

  int dim() const noexcept { return dim_; }
  const std::optional<long>& declared_support() const noexcept { return declared_support_; }
  const std::string& label() const noexcept { return label_; }
  bool has_row_support() const noexcept { return static_cast<bool>(row_support_); }

  Complex operator()(std::span<const long> i, std::span<const long> j) const { return eval_(i, j); }
  std::vector<Point> row_support(std::span<const long> i) const { return row_support_(i); }

 private:
  int dim_;
  Eval eval_;
  std::optional<long> declared_support_;
  std::string label_;
  RowSupport row_support_;
};

/// Visits every entry of the truncation to |.|_inf <= R that the kernel may
/// hold, row by row in box order and by ascending column index within a row.
/// Throws EvaluationError naming the index pair if a value is not finite.
void for_each_entry(const LatticeKernel& k, long cutoff,
                    const std::function<void(std::size_t row, std::size_t col, Complex v)>& visit);

/// Partial sum over the box of (sum_m |K(j,m)|^p)^(1/p), j the row index.
double nuclear_norm_estimate(const LatticeKernel& k, double p, long cutoff);

Complex lattice_trace(const LatticeKernel& k, long cutoff);

/// Tr(T_R^m) for the truncation T_R, computed by sparse matrix powers.
Complex cycle_trace(const LatticeKernel& k, int m, long cutoff);

/// Trace powers of the truncation, advanced incrementally and cached.
TracePowerSource lattice_trace_source(const LatticeKernel& k, long cutoff);

DetResult lattice_determinant(const LatticeKernel& k, Complex lambda, int order, long cutoff, double tol);

// Built-in kernel families.

LatticeKernel zero_kernel(int dim, std::string label = "zero");

/// K(j, j) = value for each listed j, zero elsewhere.
LatticeKernel diagonal_kernel(int dim, std::vector<std::pair<Point, Complex>> entries, std::string label = "diagonal");

/// K(j, j) = coeff * |j|_inf^exponent for j != 0 (restricted to j with every
/// coordinate >= 1 when half_line is set), zero elsewhere.
LatticeKernel diagonal_decay_kernel(int dim, Complex coeff, double exponent, bool half_line,
                                    std::optional<long> support, std::string label = "diagonal_decay");

/// K(i, j) = u(i) v(j) with u and v finitely supported.
LatticeKernel rank_one_kernel(int dim, std::vector<std::pair<Point, Complex>> u,
                              std::vector<std::pair<Point, Complex>> v, std::string label = "rank_one");

/// K(i, j) = b(i - j) * (1 + |j|_inf)^decay_exponent for listed offsets,
/// zero outside the optional support box.
LatticeKernel banded_kernel(int dim, std::vector<std::pair<Point, Complex>> bands, double decay_exponent,
                            std::optional<long> support, std::string label = "banded");

struct TableEntry {
  Point row;
  Point col;
  Complex value;
};

/// Explicit finite list of entries; repeated positions are summed.
LatticeKernel table_kernel(int dim, std::vector<TableEntry> entries, std::string label = "table");

}  // namespace specdet
