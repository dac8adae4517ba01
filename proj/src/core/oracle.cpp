#include "specdet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "specdet/errors.hpp"

namespace specdet::oracle {

TruncationIndexMap::TruncationIndexMap(int dim, long cutoff) : dim_(dim), cutoff_(cutoff) {
  if (dim < 1) throw ParameterError("dimension must be >= 1");
  if (cutoff < 0) throw ParameterError("cutoff must be >= 0");
  Point p(static_cast<std::size_t>(dim), -cutoff);
  while (true) {
    points_.push_back(p);
    int d = dim - 1;
    while (d >= 0 && p[static_cast<std::size_t>(d)] == cutoff) {
      p[static_cast<std::size_t>(d)] = -cutoff;
      --d;
    }
    if (d < 0) break;
    ++p[static_cast<std::size_t>(d)];
  }
}

std::size_t TruncationIndexMap::index(std::span<const long> p) const {
  if (static_cast<int>(p.size()) != dim_) throw LookupError("point dimension mismatch");
  std::size_t idx = 0;
  const auto side = static_cast<std::size_t>(2 * cutoff_ + 1);
  for (long c : p) {
    if (c < -cutoff_ || c > cutoff_) throw LookupError("point outside the truncation box");
    idx = idx * side + static_cast<std::size_t>(c + cutoff_);
  }
  return idx;
}

CMatrix assemble_truncation(const LatticeKernel& k, long cutoff) {
  if (cutoff < 1) throw ParameterError("cutoff must be >= 1, got " + std::to_string(cutoff));
  const double side = std::pow(2.0 * static_cast<double>(cutoff) + 1.0, k.dim());
  if (side > kMaxTruncationSide) {
    throw FeasibilityError("assemble_truncation refused: truncation side", side, kMaxTruncationSide);
  }
  const TruncationIndexMap map(k.dim(), cutoff);
  const std::size_t n = map.size();
  std::vector<Complex> data(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Complex v = k(map.point(i), map.point(j));
      if (!is_finite(v)) throw EvaluationError("kernel '" + k.label() + "' is not finite inside the truncation box");
      data[i * n + j] = v;
    }
  }
  return CMatrix(n, n, std::move(data));
}

CMatrix assemble_symbol_truncation(const ToroidalSymbol& s, long cutoff) {
  if (cutoff < 1) throw ParameterError("cutoff must be >= 1, got " + std::to_string(cutoff));
  const int n = s.dim();
  const double side = std::pow(2.0 * static_cast<double>(cutoff) + 1.0, n);
  if (side > kMaxTruncationSide) {
    throw FeasibilityError("assemble_symbol_truncation refused: truncation side", side, kMaxTruncationSide);
  }
  const TruncationIndexMap map(n, cutoff);
  const std::size_t size = map.size();
  const long nx = s.x_grid();
  std::size_t samples = 1;
  for (int d = 0; d < n; ++d) samples *= static_cast<std::size_t>(nx);

  std::vector<Complex> data(size * size);
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<long> g(static_cast<std::size_t>(n));
  for (std::size_t row = 0; row < size; ++row) {
    for (std::size_t col = 0; col < size; ++col) {
      const Point& j = map.point(row);
      const Point& k = map.point(col);
      long dist = 0;
      for (int d = 0; d < n; ++d) dist = std::max(dist, std::abs(j[static_cast<std::size_t>(d)] - k[static_cast<std::size_t>(d)]));
      if (s.x_bandwidth() && dist > *s.x_bandwidth()) continue;
      if (2 * dist >= nx) throw AliasingError("assemble_symbol_truncation: grid too coarse for the box");
      Complex acc = 0.0;
      for (std::size_t idx = 0; idx < samples; ++idx) {
        std::size_t rest = idx;
        double phase = 0.0;
        for (int d = n - 1; d >= 0; --d) {
          const auto du = static_cast<std::size_t>(d);
          g[du] = static_cast<long>(rest % static_cast<std::size_t>(nx));
          rest /= static_cast<std::size_t>(nx);
          x[du] = static_cast<double>(g[du]) / static_cast<double>(nx);
          phase += x[du] * static_cast<double>(j[du] - k[du]);
        }
        acc += s(x, k) * std::polar(1.0, -2.0 * std::acos(-1.0) * phase);
      }
      const Complex v = acc / static_cast<double>(samples);
      if (!is_finite(v)) throw EvaluationError("symbol '" + s.label() + "' is not finite inside the truncation box");
      data[row * size + col] = v;
    }
  }
  return CMatrix(size, size, std::move(data));
}

Complex direct_determinant(const CMatrix& m, Complex lambda) {
  if (!m.is_square()) throw ShapeError("direct_determinant: matrix is not square");
  const std::size_t n = m.rows();
  std::vector<Complex> data(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) data[i * n + j] = (i == j ? 1.0 : 0.0) + lambda * m(i, j);
  return lu_determinant(CMatrix(n, n, std::move(data)));
}

Complex literal_cycle_sum(const LatticeKernel& k, int m, long cutoff) {
  if (m < 1) throw ParameterError("literal_cycle_sum order must be >= 1, got " + std::to_string(m));
  if (cutoff < 1) throw ParameterError("cutoff must be >= 1, got " + std::to_string(cutoff));
  const double chains = std::pow(2.0 * static_cast<double>(cutoff) + 1.0, static_cast<double>(k.dim()) * m);
  if (chains > kMaxCycleChains) {
    throw FeasibilityError("literal_cycle_sum refused: number of closed chains", chains, kMaxCycleChains);
  }
  const TruncationIndexMap map(k.dim(), cutoff);
  const std::size_t n = map.size();
  // chain[s] is the box index of j_s for s = 0..m-1; j_m = j_0.
  std::vector<std::size_t> chain(static_cast<std::size_t>(m), 0);
  Complex total = 0.0;
  while (true) {
    Complex prod = 1.0;
    for (int s = 1; s <= m; ++s) {
      const std::size_t from = chain[static_cast<std::size_t>(s - 1)];
      const std::size_t to = chain[static_cast<std::size_t>(s % m)];
      prod *= k(map.point(from), map.point(to));
    }
    total += prod;
    int pos = m - 1;
    while (pos >= 0 && chain[static_cast<std::size_t>(pos)] == n - 1) {
      chain[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++chain[static_cast<std::size_t>(pos)];
  }
  if (!is_finite(total)) throw EvaluationError("literal_cycle_sum: non-finite result");
  return total;
}

CMatrix assemble_block_diagonal(const BlockSymbol& s) {
  std::size_t n = 0;
  for (const auto& b : s.blocks()) n += b.rows();
  std::vector<Complex> data(n * n);
  std::size_t offset = 0;
  for (const auto& b : s.blocks()) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) data[(offset + i) * n + offset + j] = b(i, j);
    offset += b.rows();
  }
  return CMatrix(n, n, std::move(data));
}

Complex integer_power(Complex z, long e) {
  if (e < 0) throw ParameterError("integer_power: negative exponent");
  Complex result = 1.0;
  while (e > 0) {
    if (e & 1) result *= z;
    z *= z;
    e >>= 1;
  }
  return result;
}

Complex spectral_direct_product(const SpectralModel& sp, double alpha, Complex lambda) {
  validate(sp);
  Complex prod = 1.0;
  for (std::size_t j = 0; j < sp.levels(); ++j) {
    const double mu = std::pow(1.0 + sp.eigenvalues[j], -alpha / sp.nu);
    prod *= integer_power(1.0 + lambda * mu, sp.multiplicities[j]);
  }
  return prod;
}

double spectral_direct_trace(const SpectralModel& sp, double alpha) {
  validate(sp);
  double total = 0.0;
  for (std::size_t j = 0; j < sp.levels(); ++j) {
    total += static_cast<double>(sp.multiplicities[j]) * std::pow(1.0 + sp.eigenvalues[j], -alpha / sp.nu);
  }
  return total;
}

CMatrix bundle_block_matrix(const BundleSymbol& a, std::size_t xi) {
  const auto side = static_cast<std::size_t>(a.dual().block(xi).dim);
  const auto d = static_cast<std::size_t>(a.fiber_dim());
  const std::size_t n = d * side;
  std::vector<Complex> data(n * n);
  for (int r = 1; r <= a.fiber_dim(); ++r) {
    for (int i = 1; i <= a.fiber_dim(); ++i) {
      const CMatrix& s = a.sigma(i, r, xi);
      for (std::size_t p = 0; p < side; ++p)
        for (std::size_t q = 0; q < side; ++q)
          data[(static_cast<std::size_t>(r - 1) * side + p) * n + static_cast<std::size_t>(i - 1) * side + q] = s(p, q);
    }
  }
  return CMatrix(n, n, std::move(data));
}

Complex bundle_direct_determinant(const BundleSymbol& a, Complex lambda) {
  Complex prod = 1.0;
  for (std::size_t x = 0; x < a.dual().size(); ++x) {
    prod *= integer_power(direct_determinant(bundle_block_matrix(a, x), lambda), a.dual().block(x).dim);
  }
  return prod;
}

BundleSymbol literal_bundle_power(const BundleSymbol& a, int m) {
  if (m < 1) throw ParameterError("literal_bundle_power exponent must be >= 1");
  const int d = a.fiber_dim();
  return BundleSymbol(
      d, a.dual(),
      [&](int rm, int r0, std::size_t x) {
        const auto side = static_cast<std::size_t>(a.dual().block(x).dim);
        std::vector<Complex> acc(side * side);
        // r[0] = r0, r[m] = rm, free indices r[1..m-1] enumerated in odometer order.
        std::vector<int> r(static_cast<std::size_t>(m + 1), 1);
        r[0] = r0;
        r[static_cast<std::size_t>(m)] = rm;
        while (true) {
          CMatrix prod = a.sigma(r[1], r[0], x);
          for (int j = 2; j <= m; ++j) {
            prod = mat_mul(prod, a.sigma(r[static_cast<std::size_t>(j)], r[static_cast<std::size_t>(j - 1)], x));
          }
          for (std::size_t e = 0; e < acc.size(); ++e) acc[e] += prod.entries()[e];
          int pos = m - 1;
          while (pos >= 1 && r[static_cast<std::size_t>(pos)] == d) {
            r[static_cast<std::size_t>(pos)] = 1;
            --pos;
          }
          if (pos < 1) break;
          ++r[static_cast<std::size_t>(pos)];
        }
        return CMatrix(side, side, std::move(acc));
      },
      a.label() + "^" + std::to_string(m));
}

}  // namespace specdet::oracle
