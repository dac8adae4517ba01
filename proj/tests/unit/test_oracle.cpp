#include <doctest.h>

#include <cmath>
#include <set>

#include "specdet/errors.hpp"
#include "specdet/oracle.hpp"
#include "support/random.hpp"

using namespace specdet;
using specdet::testing::Rng;
using specdet::testing::rel_err;

namespace {

// Characteristic polynomial coefficients c_0..c_n of b (monic, c_n = 1) by
// the Faddeev-LeVerrier recursion.
std::vector<Complex> characteristic_polynomial(const CMatrix& b) {
  const std::size_t n = b.rows();
  std::vector<Complex> c(n + 1);
  c[n] = 1.0;
  CMatrix mk = CMatrix::zeros(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    mk = mat_add(mat_mul(b, mk), mat_scale(CMatrix::identity(n), c[n - k + 1]));
    c[n - k] = -trace(mat_mul(b, mk)) / static_cast<double>(k);
  }
  return c;
}

// Roots of the monic polynomial, i.e. the eigenvalues of its companion
// matrix, by simultaneous Weierstrass iteration.
std::vector<Complex> companion_eigenvalues(const std::vector<Complex>& c) {
  const std::size_t n = c.size() - 1;
  auto p = [&](Complex z) {
    Complex acc = 1.0;
    for (std::size_t k = n; k-- > 0;) acc = acc * z + c[k];
    return acc;
  };
  double bound = 0.0;
  for (std::size_t k = 0; k < n; ++k) bound = std::max(bound, std::abs(c[k]));
  std::vector<Complex> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::pow(Complex(0.4, 0.9), static_cast<double>(i)) * (1.0 + bound);
  for (int it = 0; it < 2000; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= z[i] - z[j];
      const Complex step = p(z[i]) / denom;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15) break;
  }
  return z;
}

}  // namespace

TEST_CASE("TruncationIndexMap") {
  const oracle::TruncationIndexMap map(2, 2);
  CHECK(map.size() == 25);
  std::set<Point> seen;
  for (std::size_t i = 0; i < map.size(); ++i) {
    CHECK(map.index(map.point(i)) == i);
    seen.insert(map.point(i));
    if (i > 0) CHECK(map.point(i - 1) < map.point(i));
  }
  CHECK(seen.size() == 25);
  CHECK_THROWS_AS(map.index(Point{3, 0}), LookupError);
  const oracle::TruncationIndexMap again(2, 2);
  for (std::size_t i = 0; i < map.size(); ++i) CHECK(again.point(i) == map.point(i));
}

TEST_CASE("assemble_truncation") {
  std::vector<std::pair<Point, Complex>> ones;
  for (long j = -1; j <= 1; ++j) ones.push_back({{j}, 1.0});
  CHECK(oracle::assemble_truncation(diagonal_kernel(1, ones), 1) == CMatrix::identity(3));

  const LatticeKernel shift(
      1, [](std::span<const long> i, std::span<const long> j) { return Complex(i[0] == j[0] + 1 ? 1.0 : 0.0); },
      std::nullopt, "shift");
  CHECK(oracle::assemble_truncation(shift, 1) == CMatrix{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});

  Rng rng(71);
  for (int t = 0; t < 10; ++t) {
    const LatticeKernel k = specdet::testing::random_table_kernel(rng, 3);
    const CMatrix m = oracle::assemble_truncation(k, 4);
    const oracle::TruncationIndexMap map(1, 4);
    for (std::size_t i = 0; i < map.size(); ++i)
      for (std::size_t j = 0; j < map.size(); ++j) CHECK(m(i, j) == k(map.point(i), map.point(j)));
  }

  try {
    (void)oracle::assemble_truncation(zero_kernel(2), 71);
    FAIL("expected FeasibilityError");
  } catch (const FeasibilityError& e) {
    CHECK(e.count() == 143.0 * 143.0);
    CHECK(e.limit() == oracle::kMaxTruncationSide);
  }
}

TEST_CASE("direct_determinant") {
  CHECK(oracle::direct_determinant(CMatrix::zeros(3, 3), Complex(5.0, 1.0)) == Complex(1.0, 0.0));
  CHECK(std::abs(oracle::direct_determinant(CMatrix{{1.0, 0.0}, {0.0, 2.0}}, 1.0) - 6.0) < 1e-15);

  Rng rng(72);
  for (int t = 0; t < 30; ++t) {
    const CMatrix m = rng.matrix(6, 6);
    const CMatrix b = identity_plus(m, 0.3);
    Complex product = 1.0;
    for (const auto& z : companion_eigenvalues(characteristic_polynomial(b))) product *= z;
    CHECK(rel_err(oracle::direct_determinant(m, 0.3), product) < 1e-8);
  }
}

TEST_CASE("literal_cycle_sum") {
  Rng rng(73);
  const LatticeKernel k = specdet::testing::random_table_kernel(rng, 2);
  CHECK(std::abs(oracle::literal_cycle_sum(k, 1, 2) - lattice_trace(k, 2)) < 1e-15);

  std::vector<std::pair<Point, Complex>> e;
  Complex expected = 0.0;
  for (long j = -2; j <= 2; ++j) {
    const Complex mu = rng.unit_disc();
    e.push_back({{j}, mu});
    expected += std::pow(mu, 4);
  }
  CHECK(std::abs(oracle::literal_cycle_sum(diagonal_kernel(1, e), 4, 2) - expected) < 1e-14);

  for (int t = 0; t < 30; ++t) {
    const LatticeKernel r = specdet::testing::random_table_kernel(rng, 2);
    const Complex power = mat_power_trace(oracle::assemble_truncation(r, 2), 3);
    CHECK(std::abs(oracle::literal_cycle_sum(r, 3, 2) - power) <= 1e-12 * std::max(1.0, std::abs(power)));
  }
  CHECK_THROWS_AS(oracle::literal_cycle_sum(k, 7, 5), FeasibilityError);
}

TEST_CASE("direct determinant is multiplicative over block-diagonal kernels") {
  Rng rng(74);
  for (int t = 0; t < 20; ++t) {
    std::vector<TableEntry> left, right, both;
    for (long i = -3; i <= 3; ++i)
      for (long j = -3; j <= 3; ++j) {
        if (!rng.coin(0.6)) continue;
        const Complex v = 0.5 * rng.unit_disc();
        if (i < 0 && j < 0) left.push_back({{i}, {j}, v});
        if (i >= 0 && j >= 0) right.push_back({{i}, {j}, v});
      }
    both = left;
    both.insert(both.end(), right.begin(), right.end());
    const Complex lambda = rng.unit_disc();
    const auto det = [&](const std::vector<TableEntry>& e) {
      return oracle::direct_determinant(oracle::assemble_truncation(table_kernel(1, e), 3), lambda);
    };
    CHECK(rel_err(det(both), det(left) * det(right)) < 1e-12);
  }
}

TEST_CASE("Det(I + AB) = Det(I + BA) on rectangular factors") {
  Rng rng(75);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(2, 7));
    const std::size_t k = static_cast<std::size_t>(rng.integer(1, 7));
    const CMatrix a = rng.matrix(n, k);
    const CMatrix b = rng.matrix(k, n);
    CHECK(rel_err(oracle::direct_determinant(mat_mul(a, b), 1.0), oracle::direct_determinant(mat_mul(b, a), 1.0)) <
          1e-9);
  }
}

TEST_CASE("symbol truncation by quadrature matches the fast quantization") {
  const ToroidalSymbol s = modulated_symbol(1, {{{0}, 1.0}, {{1}, Complex(0.2, 0.1)}, {{-2}, 0.3}}, -2.0, 64);
  const CMatrix direct = oracle::assemble_symbol_truncation(s, 5);
  const CMatrix fast = oracle::assemble_truncation(toroidal_matrix(s, 5), 5);
  for (std::size_t i = 0; i < direct.entries().size(); ++i) {
    CHECK(std::abs(direct.entries()[i] - fast.entries()[i]) < 1e-12);
  }
}

TEST_CASE("bundle and spectral oracles") {
  Rng rng(76);
  const DualObject dual({{"a", 1}, {"b", 3}});
  const BundleSymbol s = specdet::testing::random_bundle(rng, 2, dual);
  for (std::size_t x = 0; x < dual.size(); ++x) CHECK(oracle::bundle_block_matrix(s, x) == flatten_symbol(s, x));

  const SpectralModel sp{{0.0, 3.0, 8.0}, {1, 2, 3}, 2.0, "small"};
  const Complex lambda(0.2, 0.1);
  const Complex expected = (1.0 + lambda) * std::pow(1.0 + lambda / 4.0, 2) * std::pow(1.0 + lambda / 9.0, 3);
  CHECK(std::abs(oracle::spectral_direct_product(sp, 2.0, lambda) - expected) < 1e-14);
  CHECK(oracle::spectral_direct_trace(sp, 2.0) == doctest::Approx(1.0 + 2.0 / 4.0 + 3.0 / 9.0));
  CHECK(oracle::integer_power(Complex(0.0, 1.0), 7) == Complex(0.0, -1.0));
}
