#include <doctest.h>

#include <cmath>

#include "specdet/bundle.hpp"
#include "specdet/errors.hpp"
#include "specdet/invariant.hpp"
#include "specdet/oracle.hpp"
#include "support/random.hpp"

using namespace specdet;
using specdet::testing::Rng;
using specdet::testing::rel_err;

namespace {

double max_diff(const CMatrix& a, const CMatrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  double d = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) d = std::max(d, std::abs(a.entries()[i] - b.entries()[i]));
  return d;
}

double symbol_diff(const BundleSymbol& a, const BundleSymbol& b) {
  double d = 0.0;
  for (std::size_t x = 0; x < a.dual().size(); ++x)
    for (int i = 1; i <= a.fiber_dim(); ++i)
      for (int r = 1; r <= a.fiber_dim(); ++r) d = std::max(d, max_diff(a.sigma(i, r, x), b.sigma(i, r, x)));
  return d;
}

double flattened_radius(const BundleSymbol& a) {
  double radius = 0.0;
  for (std::size_t x = 0; x < a.dual().size(); ++x)
    radius = std::max(radius, specdet::testing::row_sum_norm(flatten_symbol(a, x)));
  return radius;
}

const DualObject kDual({{"xi1", 1}, {"xi2", 2}});

}  // namespace

TEST_CASE("dual object") {
  CHECK(kDual.find("xi2") == 1);
  CHECK_THROWS_AS(kDual.find("xi3"), LookupError);
  CHECK_THROWS_AS(DualObject({{"a", 1}, {"a", 2}}), ModelError);
  CHECK_THROWS_AS(DualObject({{"a", 0}}), ModelError);
}

TEST_CASE("symbol construction checks block sides") {
  CHECK_THROWS_AS(BundleSymbol(2, kDual, [](int, int, std::size_t) { return CMatrix::identity(2); }), ShapeError);
  const BundleSymbol id = BundleSymbol::identity(2, kDual);
  CHECK_THROWS_AS(id.sigma(3, 1, std::size_t{0}), ShapeError);
  CHECK(id.sigma(2, 2, "xi2") == CMatrix::identity(2));
}

TEST_CASE("bundle_compose") {
  Rng rng(61);
  SUBCASE("identity on the right") {
    const BundleSymbol b = specdet::testing::random_bundle(rng, 3, kDual);
    CHECK(symbol_diff(bundle_compose(b, BundleSymbol::identity(3, kDual)), b) == 0.0);
  }
  SUBCASE("scalar fiber is a pointwise matrix product") {
    const BundleSymbol a = specdet::testing::random_bundle(rng, 1, kDual);
    const BundleSymbol b = specdet::testing::random_bundle(rng, 1, kDual);
    const BundleSymbol ba = bundle_compose(b, a);
    for (std::size_t x = 0; x < kDual.size(); ++x) {
      CHECK(ba.sigma(1, 1, x) == mat_mul(b.sigma(1, 1, x), a.sigma(1, 1, x)));
    }
  }
  SUBCASE("flattening is a homomorphism") {
    const DualObject dual({{"p", 2}, {"q", 2}});
    for (int t = 0; t < 30; ++t) {
      const BundleSymbol a = specdet::testing::random_bundle(rng, 2, dual);
      const BundleSymbol b = specdet::testing::random_bundle(rng, 2, dual);
      const BundleSymbol ba = bundle_compose(b, a);
      for (std::size_t x = 0; x < dual.size(); ++x) {
        CHECK(max_diff(flatten_symbol(ba, x), mat_mul(flatten_symbol(b, x), flatten_symbol(a, x))) < 1e-12);
      }
    }
  }
  SUBCASE("mismatched operands") {
    CHECK_THROWS_AS(bundle_compose(BundleSymbol::identity(2, kDual), BundleSymbol::identity(3, kDual)), ShapeError);
    CHECK_THROWS_AS(bundle_compose(BundleSymbol::identity(2, kDual), BundleSymbol::identity(2, DualObject({{"a", 1}}))),
                    ShapeError);
  }
}

TEST_CASE("bundle_power") {
  Rng rng(62);
  for (int m = 1; m <= 4; ++m) {
    CHECK(symbol_diff(bundle_power(BundleSymbol::identity(2, kDual), m), BundleSymbol::identity(2, kDual)) == 0.0);
  }
  SUBCASE("scalar fiber is a matrix power") {
    const BundleSymbol a = specdet::testing::random_bundle(rng, 1, kDual);
    for (std::size_t x = 0; x < kDual.size(); ++x) {
      CHECK(max_diff(bundle_power(a, 4).sigma(1, 1, x), mat_power(a.sigma(1, 1, x), 4)) < 1e-14);
    }
  }
  SUBCASE("scalar blocks against the explicit double sum") {
    const DualObject dual({{"one", 1}});
    for (int t = 0; t < 20; ++t) {
      const BundleSymbol a = specdet::testing::random_bundle(rng, 2, dual);
      const BundleSymbol p = bundle_power(a, 3);
      const auto s = [&](int i, int r) { return a.sigma(i, r, std::size_t{0})(0, 0); };
      for (int r0 = 1; r0 <= 2; ++r0)
        for (int r3 = 1; r3 <= 2; ++r3) {
          Complex acc = 0.0;
          for (int r1 = 1; r1 <= 2; ++r1)
            for (int r2 = 1; r2 <= 2; ++r2) acc += s(r1, r0) * s(r2, r1) * s(r3, r2);
          CHECK(std::abs(p.sigma(r3, r0, std::size_t{0})(0, 0) - acc) < 1e-12);
        }
    }
  }
  SUBCASE("iterated composition against the literal multi-index sum") {
    for (int t = 0; t < 20; ++t) {
      const int fiber = static_cast<int>(rng.integer(1, 3));
      const DualObject dual = specdet::testing::random_dual(rng, 2, 2);
      const BundleSymbol a = specdet::testing::random_bundle(rng, fiber, dual);
      for (int m = 1; m <= 4; ++m) CHECK(symbol_diff(bundle_power(a, m), oracle::literal_bundle_power(a, m)) < 1e-10);
    }
  }
  CHECK_THROWS_AS(bundle_power(BundleSymbol::identity(1, kDual), 0), ParameterError);
}

TEST_CASE("bundle_trace") {
  CHECK(bundle_trace(BundleSymbol::zero(2, kDual)) == Complex(0.0, 0.0));
  // sum_xi d_tau d_xi^2 = 3 (1 + 4).
  CHECK(bundle_trace(BundleSymbol::identity(3, kDual)) == Complex(15.0, 0.0));
  Rng rng(63);
  for (int t = 0; t < 20; ++t) {
    const BundleSymbol a = specdet::testing::random_bundle(rng, 3, kDual);
    Complex expected = 0.0;
    for (std::size_t x = 0; x < kDual.size(); ++x) {
      expected += static_cast<double>(kDual.block(x).dim) * trace(flatten_symbol(a, x));
    }
    CHECK(std::abs(bundle_trace(a) - expected) < 1e-12);
  }
}

TEST_CASE("flatten_symbol") {
  Rng rng(64);
  const BundleSymbol scalar = specdet::testing::random_bundle(rng, 1, kDual);
  CHECK(flatten_symbol(scalar, "xi2") == scalar.sigma(1, 1, "xi2"));
  CHECK(flatten_symbol(BundleSymbol::identity(3, kDual), "xi2") == CMatrix::identity(6));

  // Block (r, i) holds sigma(i, r).
  const DualObject one({{"one", 1}});
  const BundleSymbol s(2, one, [](int i, int r, std::size_t) { return CMatrix{{Complex(10.0 * i + r)}}; });
  CHECK(flatten_symbol(s, "one") == CMatrix{{11.0, 21.0}, {12.0, 22.0}});
  CHECK_THROWS_AS(flatten_symbol(s, "two"), LookupError);
}

TEST_CASE("bundle_determinant") {
  CHECK(bundle_determinant(BundleSymbol::zero(2, kDual), 0.4, 30, 1e-10).value == Complex(1.0, 0.0));

  const Complex mu(0.6, 0.2), lambda(0.5, -0.25);
  const DualObject one({{"one", 1}});
  const BundleSymbol scalar(1, one, [&](int, int, std::size_t) { return CMatrix{{mu}}; });
  CHECK(std::abs(bundle_determinant(scalar, lambda, 60, 1e-14).value - (1.0 + lambda * mu)) < 1e-12);

  Rng rng(65);
  for (int t = 0; t < 30; ++t) {
    const BundleSymbol a = specdet::testing::random_bundle(rng, 2, kDual, 0.5);
    const Complex l = 0.2 * rng.unit_disc() / std::max(1.0, flattened_radius(a));
    const DetResult r = bundle_determinant(a, l, 60, 1e-14);
    REQUIRE(r.converged);
    Complex product = 1.0;
    for (std::size_t x = 0; x < kDual.size(); ++x) {
      product *= std::pow(lu_determinant(identity_plus(flatten_symbol(a, x), l)), kDual.block(x).dim);
    }
    CHECK(rel_err(r.value, product) < 1e-8);
  }
}

TEST_CASE("unitary conjugation leaves the determinant unchanged") {
  Rng rng(66);
  for (int t = 0; t < 20; ++t) {
    const BundleSymbol a = specdet::testing::random_bundle(rng, 2, kDual, 0.5);
    std::vector<CMatrix> u;
    for (std::size_t x = 0; x < kDual.size(); ++x) u.push_back(rng.unitary(static_cast<std::size_t>(kDual.block(x).dim)));
    // Conjugating every sigma(i, r, xi) by U_xi conjugates S_xi by I (x) U_xi.
    const BundleSymbol b(2, kDual, [&](int i, int r, std::size_t x) {
      return mat_mul(mat_mul(u[x], a.sigma(i, r, x)), conjugate_transpose(u[x]));
    });
    const Complex l = 0.3 * rng.unit_disc() / std::max(1.0, flattened_radius(a));
    const Complex va = bundle_determinant(a, l, 60, 1e-14).value;
    const Complex vb = bundle_determinant(b, l, 60, 1e-14).value;
    CHECK(std::abs(va - vb) < 1e-10 * std::max(1.0, std::abs(va)));
  }
}

TEST_CASE("scalar fiber reduces to block symbols with multiplicity") {
  Rng rng(67);
  for (int t = 0; t < 20; ++t) {
    const DualObject dual = specdet::testing::random_dual(rng, 3, 3);
    const BundleSymbol a = specdet::testing::random_bundle(rng, 1, dual, 0.4);
    std::vector<CMatrix> blocks;
    for (std::size_t x = 0; x < dual.size(); ++x)
      for (int c = 0; c < dual.block(x).dim; ++c) blocks.push_back(a.sigma(1, 1, x));
    const Complex l = 0.3 * rng.unit_disc() / std::max(1.0, flattened_radius(a));
    const Complex va = bundle_determinant(a, l, 60, 1e-14).value;
    const Complex vb = invariant_determinant(BlockSymbol(blocks), l, 60, 1e-14).value;
    CHECK(std::abs(va - vb) < 1e-10 * std::max(1.0, std::abs(vb)));
  }
}
