#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specdet/cmatrix.hpp"
#include "specdet/plemelj.hpp"

namespace specdet {

/// Matrix symbol of an operator that preserves every subspace H_l of an
/// orthogonal decomposition, truncated to l = 0..L. Block l acts on the
/// coordinate column of H_l, so its side is d_l = dim H_l.
class BlockSymbol {
 public:
  /// Throws ShapeError if a block is not square.
  explicit BlockSymbol(std::vector<CMatrix> blocks, std::string label = "block_symbol");

  std::size_t truncation() const noexcept { return blocks_.empty() ? 0 : blocks_.size() - 1; }
  std::size_t size() const noexcept { return blocks_.size(); }
  std::size_t dim(std::size_t l) const { return blocks_.at(l).rows(); }
  const CMatrix& block(std::size_t l) const { return blocks_.at(l); }
  const std::vector<CMatrix>& blocks() const noexcept { return blocks_; }
  const std::string& label() const noexcept { return label_; }

 private:
  std::vector<CMatrix> blocks_;
  std::string label_;
};

Complex block_trace(const BlockSymbol& s);

/// sum_l Tr(block(l)^m).
Complex block_power_trace(const BlockSymbol& s, int m);

TracePowerSource block_trace_source(const BlockSymbol& s);

DetResult invariant_determinant(const BlockSymbol& s, Complex lambda, int order, double tol);

/// Spectrum of a positive elliptic operator E of order nu: eigenvalue
/// lambda_j >= 0 with multiplicity d_j for j = 0..J.
struct SpectralModel {
  std::vector<double> eigenvalues;
  std::vector<long> multiplicities;
  double nu = 2.0;
  std::string label = "spectral_model";

  std::size_t levels() const noexcept { return eigenvalues.size(); }
};

/// Throws ModelError for negative or non-finite eigenvalues, multiplicities
/// below 1, mismatched lengths or nu <= 0.
void validate(const SpectralModel& sp);

/// Laplacian on the circle R/Z: 4 pi^2 k^2 for k = 0..J, d_0 = 1, d_k = 2.
SpectralModel circle_spectrum(long levels);

/// Laplacian on the flat torus R^2/Z^2: distinct values 4 pi^2 (a^2 + b^2)
/// in increasing order, multiplicity = number of integer pairs (a, b)
/// representing the value. The first J + 1 levels are returned.
SpectralModel torus2_spectrum(long levels);

/// Laplacian on the round sphere S^2: j (j + 1), multiplicity 2j + 1.
SpectralModel sphere2_spectrum(long levels);

/// Eigenvalues (1 + lambda_j)^(-alpha/nu) of A = (I + E)^(-alpha/nu).
std::vector<double> resolvent_power_eigenvalues(const SpectralModel& sp, double alpha);

TracePowerSource manifold_trace_source(const SpectralModel& sp, double alpha);

/// Share of sum_{j<=J} d_j (1+lambda_j)^(-alpha/nu) contributed by the last
/// half J/2 < j <= J. Below 0.05 reads as convergent. Requires J >= 10;
/// levels beyond the model contribute nothing.
double weyl_tail_check(const SpectralModel& sp, double alpha, long levels);

/// Det(I + lambda (I+E)^(-alpha/nu)) over the model's full spectrum. When the
/// model has at least 10 levels the tail check runs and a warning is added if
/// its ratio is 0.05 or more; manifold_dim, when given, adds a warning for
/// alpha <= n.
DetResult manifold_determinant(const SpectralModel& sp, double alpha, Complex lambda, int order, double tol,
                               std::optional<int> manifold_dim = std::nullopt);

}  // namespace specdet
