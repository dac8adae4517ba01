#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "specdet/bundle.hpp"
#include "specdet/cmatrix.hpp"
#include "specdet/invariant.hpp"
#include "specdet/lattice.hpp"
#include "specdet/toroidal.hpp"

// Brute-force reference computations. Nothing here calls into the series
// fast paths: every routine below is a direct transcription of the
// corresponding finite sum or product and is meant for small instances.
namespace specdet::oracle {

/// Bijection between {0, ..., (2R+1)^n - 1} and the box |.|_inf <= R in
/// lexicographic order (last coordinate fastest).
class TruncationIndexMap {
 public:
  TruncationIndexMap(int dim, long cutoff);

  int dim() const noexcept { return dim_; }
  long cutoff() const noexcept { return cutoff_; }
  std::size_t size() const noexcept { return points_.size(); }
  const Point& point(std::size_t idx) const { return points_.at(idx); }
  /// Throws LookupError for points outside the box.
  std::size_t index(std::span<const long> p) const;

 private:
  int dim_;
  long cutoff_;
  std::vector<Point> points_;
};

inline constexpr double kMaxTruncationSide = 20000;
inline constexpr double kMaxCycleChains = 1e7;

/// Matrix of the truncated kernel, entry (i, j) = K(point(i), point(j)).
/// Throws FeasibilityError when (2R+1)^n > 20000.
CMatrix assemble_truncation(const LatticeKernel& k, long cutoff);

/// Matrix of the toroidal quantization on the box, entry (j, k) the plain
/// Riemann sum N_x^(-n) sum_x exp(-2 pi i x.(j - k)) sigma(x, k). Entries with
/// |j - k|_inf beyond a declared x-bandwidth are left zero. Same size guard
/// as assemble_truncation.
CMatrix assemble_symbol_truncation(const ToroidalSymbol& s, long cutoff);

/// lu_determinant(I + lambda m).
Complex direct_determinant(const CMatrix& m, Complex lambda);

/// sum over closed chains j_0 -> j_1 -> ... -> j_m = j_0 in the box of
/// prod_s K(j_{s-1}, j_s). Throws FeasibilityError when (2R+1)^(n m) > 1e7.
Complex literal_cycle_sum(const LatticeKernel& k, int m, long cutoff);

/// Block-diagonal matrix diag(block(0), ..., block(L)).
CMatrix assemble_block_diagonal(const BlockSymbol& s);

/// prod_j (1 + lambda (1 + lambda_j)^(-alpha/nu))^(d_j).
Complex spectral_direct_product(const SpectralModel& sp, double alpha, Complex lambda);

/// sum_j d_j (1 + lambda_j)^(-alpha/nu).
double spectral_direct_trace(const SpectralModel& sp, double alpha);

/// The stacked-column matrix of a bundle symbol at dual block xi, block (r, i)
/// = sigma(i, r, xi), assembled entry by entry.
CMatrix bundle_block_matrix(const BundleSymbol& a, std::size_t xi);

/// prod_xi det(I + lambda S_xi)^(d_xi).
Complex bundle_direct_determinant(const BundleSymbol& a, Complex lambda);

/// sigma_{A^m}(r_m, r_0, xi) = sum_{r_1..r_{m-1}} prod_{j=1..m} sigma(r_j, r_{j-1}, xi),
/// factors multiplied left to right in increasing j.
BundleSymbol literal_bundle_power(const BundleSymbol& a, int m);

/// z^e for e >= 0 by repeated squaring.
Complex integer_power(Complex z, long e);

}  // namespace specdet::oracle
