#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "specdet/cmatrix.hpp"
#include "specdet/plemelj.hpp"

namespace specdet {

struct DualBlock {
  std::string id;
  int dim = 1;

  friend bool operator==(const DualBlock&, const DualBlock&) = default;
};

/// Finite list of retained classes of the unitary dual, one block per class.
class DualObject {
 public:
  /// Throws ModelError on duplicate ids or dims below 1.
  explicit DualObject(std::vector<DualBlock> blocks, std::string label = "dual");

  std::size_t size() const noexcept { return blocks_.size(); }
  const DualBlock& block(std::size_t x) const { return blocks_.at(x); }
  const std::vector<DualBlock>& blocks() const noexcept { return blocks_; }
  const std::string& label() const noexcept { return label_; }

  /// Position of the block with this id; throws LookupError if absent.
  std::size_t find(std::string_view id) const;

  friend bool operator==(const DualObject& a, const DualObject& b) { return a.blocks_ == b.blocks_; }

 private:
  std::vector<DualBlock> blocks_;
  std::string label_;
};

/// Vector-valued symbol sigma(i, r, xi): for fiber indices 1 <= i, r <= d_tau
/// and each retained xi, a d_xi x d_xi matrix. In the operator, i indexes the
/// input fiber component and r the output component.
class BundleSymbol {
 public:
  using Generator = std::function<CMatrix(int i, int r, std::size_t xi)>;

  /// Calls gen for every (i, r, xi) and checks each result has side d_xi.
  BundleSymbol(int fiber_dim, DualObject dual, const Generator& gen, std::string label = "bundle_symbol");

  static BundleSymbol zero(int fiber_dim, DualObject dual);
  static BundleSymbol identity(int fiber_dim, DualObject dual);

  int fiber_dim() const noexcept { return fiber_dim_; }
  const DualObject& dual() const noexcept { return dual_; }
  const std::string& label() const noexcept { return label_; }

  /// 1-based fiber indices, xi by position in the dual list.
  const CMatrix& sigma(int i, int r, std::size_t xi) const;
  const CMatrix& sigma(int i, int r, std::string_view xi) const { return sigma(i, r, dual_.find(xi)); }

 private:
  int fiber_dim_;
  DualObject dual_;
  std::string label_;
  // per xi: fiber_dim^2 matrices at (i-1)*fiber_dim + (r-1).
  std::vector<std::vector<CMatrix>> sigma_;
};

/// Symbol of B∘A: sigma_BA(i, s, xi) = sum_r sigma_B(r, s, xi) sigma_A(i, r, xi).
BundleSymbol bundle_compose(const BundleSymbol& b, const BundleSymbol& a);

/// Symbol of A^m by iterated composition.
BundleSymbol bundle_power(const BundleSymbol& a, int m);

/// sum_xi sum_i d_xi Tr(sigma(i, i, xi)).
Complex bundle_trace(const BundleSymbol& a);

/// The (d_tau d_xi)-square matrix whose block (r, i) is sigma(i, r, xi); it
/// acts on the stacked Fourier columns (f_1(xi); ...; f_dtau(xi)).
///
/// Worked example, d_tau = 2, d_xi = 1, sigma(i, r) = s_ir:
///   S = [[s_11, s_21],
///        [s_12, s_22]]
/// so the output component r = 2 collects s_12 f_1 + s_22 f_2.
CMatrix flatten_symbol(const BundleSymbol& a, std::string_view xi);
CMatrix flatten_symbol(const BundleSymbol& a, std::size_t xi);

/// m -> sum_xi d_xi Tr(S_xi^m).
TracePowerSource bundle_trace_source(const BundleSymbol& a);

DetResult bundle_determinant(const BundleSymbol& a, Complex lambda, int order, double tol);

}  // namespace specdet
