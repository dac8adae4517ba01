#include "specdet/bundle.hpp"

#include <memory>
#include <set>

#include "specdet/errors.hpp"

namespace specdet {

DualObject::DualObject(std::vector<DualBlock> blocks, std::string label)
    : blocks_(std::move(blocks)), label_(std::move(label)) {
  std::set<std::string> seen;
  for (const auto& b : blocks_) {
    if (b.dim < 1) throw ModelError("dual block '" + b.id + "' has dimension " + std::to_string(b.dim));
    if (!seen.insert(b.id).second) throw ModelError("duplicate dual block id '" + b.id + "'");
  }
}

std::size_t DualObject::find(std::string_view id) const {
  for (std::size_t x = 0; x < blocks_.size(); ++x)
    if (blocks_[x].id == id) return x;
  throw LookupError("unknown dual block '" + std::string(id) + "'");
}

BundleSymbol::BundleSymbol(int fiber_dim, DualObject dual, const Generator& gen, std::string label)
    : fiber_dim_(fiber_dim), dual_(std::move(dual)), label_(std::move(label)) {
  if (fiber_dim_ < 1) throw ParameterError("fiber dimension must be >= 1");
  sigma_.resize(dual_.size());
  for (std::size_t x = 0; x < dual_.size(); ++x) {
    const auto side = static_cast<std::size_t>(dual_.block(x).dim);
    sigma_[x].reserve(static_cast<std::size_t>(fiber_dim_ * fiber_dim_));
    for (int i = 1; i <= fiber_dim_; ++i) {
      for (int r = 1; r <= fiber_dim_; ++r) {
        CMatrix m = gen(i, r, x);
        if (m.rows() != side || m.cols() != side) {
          throw ShapeError("sigma(" + std::to_string(i) + "," + std::to_string(r) + "," + dual_.block(x).id + ") is " +
                           std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected " +
                           std::to_string(side) + "x" + std::to_string(side));
        }
        sigma_[x].push_back(std::move(m));
      }
    }
  }
}

BundleSymbol BundleSymbol::zero(int fiber_dim, DualObject dual) {
  const DualObject d = dual;
  return BundleSymbol(
      fiber_dim, std::move(dual),
      [&d](int, int, std::size_t x) {
        const auto s = static_cast<std::size_t>(d.block(x).dim);
        return CMatrix::zeros(s, s);
      },
      "zero");
}

BundleSymbol BundleSymbol::identity(int fiber_dim, DualObject dual) {
  const DualObject d = dual;
  return BundleSymbol(
      fiber_dim, std::move(dual),
      [&d](int i, int r, std::size_t x) {
        const auto s = static_cast<std::size_t>(d.block(x).dim);
        return i == r ? CMatrix::identity(s) : CMatrix::zeros(s, s);
      },
      "identity");
}

const CMatrix& BundleSymbol::sigma(int i, int r, std::size_t xi) const {
  if (i < 1 || i > fiber_dim_ || r < 1 || r > fiber_dim_) {
    throw ShapeError("fiber index (" + std::to_string(i) + "," + std::to_string(r) + ") outside 1.." +
                     std::to_string(fiber_dim_));
  }
  return sigma_.at(xi)[static_cast<std::size_t>((i - 1) * fiber_dim_ + (r - 1))];
}

BundleSymbol bundle_compose(const BundleSymbol& b, const BundleSymbol& a) {
  if (a.fiber_dim() != b.fiber_dim()) {
    throw ShapeError("bundle_compose: fiber dimensions " + std::to_string(b.fiber_dim()) + " and " +
                     std::to_string(a.fiber_dim()) + " differ");
  }
  if (!(a.dual() == b.dual())) throw ShapeError("bundle_compose: symbols live on different dual objects");
  const int d = a.fiber_dim();
  return BundleSymbol(
      d, a.dual(),
      [&](int i, int s, std::size_t x) {
        CMatrix acc = mat_mul(b.sigma(1, s, x), a.sigma(i, 1, x));
        for (int r = 2; r <= d; ++r) acc = mat_add(acc, mat_mul(b.sigma(r, s, x), a.sigma(i, r, x)));
        return acc;
      },
      b.label() + "*" + a.label());
}

BundleSymbol bundle_power(const BundleSymbol& a, int m) {
  if (m < 1) throw ParameterError("bundle_power exponent must be >= 1, got " + std::to_string(m));
  BundleSymbol acc = a;
  // A^(k+1) = A ∘ A^k.
  for (int k = 1; k < m; ++k) acc = bundle_compose(a, acc);
  return acc;
}

Complex bundle_trace(const BundleSymbol& a) {
  Complex acc = 0.0;
  for (std::size_t x = 0; x < a.dual().size(); ++x) {
    const double weight = a.dual().block(x).dim;
    for (int i = 1; i <= a.fiber_dim(); ++i) acc += weight * trace(a.sigma(i, i, x));
  }
  return acc;
}

CMatrix flatten_symbol(const BundleSymbol& a, std::size_t xi) {
  if (xi >= a.dual().size()) throw LookupError("dual block index " + std::to_string(xi) + " out of range");
  const auto side = static_cast<std::size_t>(a.dual().block(xi).dim);
  const auto d = static_cast<std::size_t>(a.fiber_dim());
  return CMatrix::generate(d * side, d * side, [&](std::size_t row, std::size_t col) {
    const int r = static_cast<int>(row / side) + 1;
    const int i = static_cast<int>(col / side) + 1;
    return a.sigma(i, r, xi)(row % side, col % side);
  });
}

CMatrix flatten_symbol(const BundleSymbol& a, std::string_view xi) { return flatten_symbol(a, a.dual().find(xi)); }

namespace {

class BundlePowerCache {
 public:
  explicit BundlePowerCache(const BundleSymbol& a) {
    for (std::size_t x = 0; x < a.dual().size(); ++x) {
      base_.push_back(flatten_symbol(a, x));
      weight_.push_back(a.dual().block(x).dim);
    }
  }

  Complex trace(int m) {
    if (m < 1) throw ParameterError("trace power order must be >= 1, got " + std::to_string(m));
    while (static_cast<int>(traces_.size()) < m) {
      if (traces_.empty()) {
        power_ = base_;
      } else {
        for (std::size_t x = 0; x < base_.size(); ++x) power_[x] = mat_mul(power_[x], base_[x]);
      }
      Complex acc = 0.0;
      for (std::size_t x = 0; x < power_.size(); ++x) acc += weight_[x] * specdet::trace(power_[x]);
      traces_.push_back(acc);
    }
    return traces_[static_cast<std::size_t>(m - 1)];
  }

 private:
  std::vector<CMatrix> base_;
  std::vector<double> weight_;
  std::vector<CMatrix> power_;
  std::vector<Complex> traces_;
};

}  // namespace

TracePowerSource bundle_trace_source(const BundleSymbol& a) {
  auto cache = std::make_shared<BundlePowerCache>(a);
  TracePowerSource src;
  src.trace_power = [cache](int m) { return cache->trace(m); };
  src.label = a.label();
  return src;
}

DetResult bundle_determinant(const BundleSymbol& a, Complex lambda, int order, double tol) {
  return plemelj_det(bundle_trace_source(a), lambda, order, tol);
}

}  // namespace specdet
