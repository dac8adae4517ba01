#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specdet/lattice.hpp"

namespace specdet {

/// A toroidal symbol sigma(x, k) on [0,1)^n x Z^n, sampled on a uniform grid
/// of x_grid points per coordinate when Fourier coefficients in x are taken.
///
/// x_bandwidth, when set, declares sigma(., k) to be a trigonometric
/// polynomial of degree <= D in every coordinate (D = 0: independent of x).
/// The declared order is a user claim used for warnings only.
class ToroidalSymbol {
 public:
  using Eval = std::function<Complex(std::span<const double> x, std::span<const long> k)>;

  ToroidalSymbol(int dim, std::optional<double> order, Eval eval, int x_grid, std::string label,
                 std::optional<int> x_bandwidth = std::nullopt);

  int dim() const noexcept { return dim_; }
  const std::optional<double>& order() const noexcept { return order_; }
  int x_grid() const noexcept { return x_grid_; }
  const std::string& label() const noexcept { return label_; }
  const std::optional<int>& x_bandwidth() const noexcept { return x_bandwidth_; }
  bool x_independent() const noexcept { return x_bandwidth_ && *x_bandwidth_ == 0; }

  Complex operator()(std::span<const double> x, std::span<const long> k) const { return eval_(x, k); }

  /// Same symbol on a different sampling grid.
  ToroidalSymbol with_grid(int x_grid) const;

 private:
  int dim_;
  std::optional<double> order_;
  Eval eval_;
  int x_grid_;
  std::string label_;
  std::optional<int> x_bandwidth_;
};

/// Smallest power of two >= 4 * (2R + 1).
int default_x_grid(long cutoff);

/// Riemann sum of exp(-2 pi i x.l) sigma(x, k) over the N_x^n grid. Throws
/// AliasingError unless |l|_inf < N_x / 2.
Complex symbol_fourier_coeff(const ToroidalSymbol& s, std::span<const long> l, std::span<const long> k);

/// Kernel A_jk = sigma_hat(j - k, k) on the box |.|_inf <= R, zero outside.
/// The coefficients are computed once and stored. For symbols with a declared
/// x-bandwidth D the ring |l|_inf = D + 1 is checked to vanish (to 1e-12
/// relative) and modes beyond D are stored as exact zeros.
LatticeKernel toroidal_matrix(const ToroidalSymbol& s, long cutoff);

/// sum_{|j|,|k| <= R} |K(j, k)|.
double poincare_norm(const LatticeKernel& k, long cutoff);

/// (max column sum)^(1/p) * (max row sum)^(1 - 1/p) over the truncation;
/// p = +inf is allowed.
double schur_bound(const LatticeKernel& k, double p, long cutoff);

DetResult toroidal_determinant(const ToroidalSymbol& s, Complex lambda, int order, long cutoff, double tol);

enum class GrowthVerdict { converging, diverging_or_inconclusive };

const char* to_string(GrowthVerdict v) noexcept;

struct NormProfile {
  std::vector<std::pair<long, double>> points;  // (R, norm)
  std::vector<double> increments;
  GrowthVerdict verdict = GrowthVerdict::diverging_or_inconclusive;
};

/// Classifies a norm profile: converging when every increment is zero or the
/// increments shrink by a ratio below 0.9 at each step (needs at least two
/// increments); otherwise diverging/inconclusive.
NormProfile classify_profile(std::vector<std::pair<long, double>> points);

/// Poincare norm of toroidal_matrix(s, R) for each ascending cutoff R. Each
/// truncation is sampled on a grid of at least default_x_grid(R) points.
NormProfile norm_growth_profile(const ToroidalSymbol& s, const std::vector<long>& cutoffs);

/// Same profile for a kernel given directly.
NormProfile kernel_norm_profile(const LatticeKernel& k, const std::vector<long>& cutoffs);

// Built-in symbol families.

/// coeff * (1 + |k|^2)^(order/2), independent of x.
ToroidalSymbol power_decay_symbol(int dim, Complex coeff, double order, int x_grid, std::string label = "power_decay");

/// (1 + |k|)^(-n), independent of x; it lies in every class of order >= -n.
ToroidalSymbol sharpness_symbol(int dim, int x_grid, std::string label = "sharpness");

struct SymbolMode {
  Point theta;
  Complex coeff;
};

/// sum_theta c_theta exp(2 pi i x.theta) * (1 + |k|^2)^(order/2).
ToroidalSymbol modulated_symbol(int dim, std::vector<SymbolMode> modes, double order, int x_grid,
                                std::string label = "modulated");

struct SymbolCoefficient {
  Point l;
  Point k;
  Complex value;
};

/// Symbol given by explicit coefficients sigma_hat(l, k); all others vanish.
ToroidalSymbol custom_table_symbol(int dim, std::vector<SymbolCoefficient> entries, std::optional<double> order,
                                   int x_grid, std::string label = "custom_table");

}  // namespace specdet
