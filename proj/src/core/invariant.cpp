#include "specdet/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include "specdet/errors.hpp"

namespace specdet {

BlockSymbol::BlockSymbol(std::vector<CMatrix> blocks, std::string label)
    : blocks_(std::move(blocks)), label_(std::move(label)) {
  for (std::size_t l = 0; l < blocks_.size(); ++l) {
    if (!blocks_[l].is_square()) {
      throw ShapeError("block[" + std::to_string(l) + "] is " + std::to_string(blocks_[l].rows()) + "x" +
                       std::to_string(blocks_[l].cols()) + ", expected square");
    }
  }
}

Complex block_trace(const BlockSymbol& s) {
  Complex acc = 0.0;
  for (const auto& b : s.blocks())
    for (std::size_t i = 0; i < b.rows(); ++i) acc += b(i, i);
  return acc;
}

Complex block_power_trace(const BlockSymbol& s, int m) {
  if (m < 1) throw ParameterError("block_power_trace order must be >= 1, got " + std::to_string(m));
  Complex acc = 0.0;
  for (const auto& b : s.blocks()) acc += mat_power_trace(b, m);
  return acc;
}

namespace {

// Keeps block(l)^m for every l and advances all of them together.
class BlockPowerCache {
 public:
  explicit BlockPowerCache(const BlockSymbol& s) : base_(s.blocks()) {}

  Complex trace(int m) {
    if (m < 1) throw ParameterError("trace power order must be >= 1, got " + std::to_string(m));
    while (static_cast<int>(traces_.size()) < m) {
      if (traces_.empty()) {
        power_ = base_;
      } else {
        for (std::size_t l = 0; l < base_.size(); ++l) power_[l] = mat_mul(power_[l], base_[l]);
      }
      Complex acc = 0.0;
      for (const auto& p : power_) acc += specdet::trace(p);
      traces_.push_back(acc);
    }
    return traces_[static_cast<std::size_t>(m - 1)];
  }

 private:
  std::vector<CMatrix> base_;
  std::vector<CMatrix> power_;
  std::vector<Complex> traces_;
};

}  // namespace

TracePowerSource block_trace_source(const BlockSymbol& s) {
  auto cache = std::make_shared<BlockPowerCache>(s);
  TracePowerSource src;
  src.trace_power = [cache](int m) { return cache->trace(m); };
  src.label = s.label();
  return src;
}

DetResult invariant_determinant(const BlockSymbol& s, Complex lambda, int order, double tol) {
  DetResult out = plemelj_det(block_trace_source(s), lambda, order, tol);
  out.cutoff_used = static_cast<long>(s.truncation());
  return out;
}

void validate(const SpectralModel& sp) {
  if (sp.eigenvalues.size() != sp.multiplicities.size()) {
    throw ModelError("spectral model '" + sp.label + "' has " + std::to_string(sp.eigenvalues.size()) +
                     " eigenvalues but " + std::to_string(sp.multiplicities.size()) + " multiplicities");
  }
  if (!(sp.nu > 0.0) || !std::isfinite(sp.nu)) throw ModelError("spectral model order nu must be positive");
  for (std::size_t j = 0; j < sp.eigenvalues.size(); ++j) {
    const double e = sp.eigenvalues[j];
    if (!std::isfinite(e) || e < 0.0) {
      throw ModelError("eigenvalue lambda_" + std::to_string(j) + " = " + std::to_string(e) +
                       " is not a nonnegative number (E must be positive)");
    }
    if (sp.multiplicities[j] < 1) {
      throw ModelError("multiplicity d_" + std::to_string(j) + " must be >= 1");
    }
  }
}

SpectralModel circle_spectrum(long levels) {
  if (levels < 0) throw ParameterError("spectrum level count must be >= 0");
  SpectralModel sp;
  sp.label = "circle";
  sp.nu = 2.0;
  for (long k = 0; k <= levels; ++k) {
    const double kk = static_cast<double>(k);
    sp.eigenvalues.push_back(4.0 * std::numbers::pi * std::numbers::pi * kk * kk);
    sp.multiplicities.push_back(k == 0 ? 1 : 2);
  }
  return sp;
}

SpectralModel torus2_spectrum(long levels) {
  if (levels < 0) throw ParameterError("spectrum level count must be >= 0");
  // Counts of a^2 + b^2 = v are complete for v <= bound^2.
  long bound = 8;
  std::map<long, long> counts;
  while (true) {
    counts.clear();
    const long limit = bound * bound;
    for (long a = -bound; a <= bound; ++a)
      for (long b = -bound; b <= bound; ++b) {
        const long v = a * a + b * b;
        if (v <= limit) ++counts[v];
      }
    if (static_cast<long>(counts.size()) >= levels + 1) break;
    bound *= 2;
  }
  SpectralModel sp;
  sp.label = "torus2";
  sp.nu = 2.0;
  for (const auto& [v, c] : counts) {
    if (static_cast<long>(sp.eigenvalues.size()) == levels + 1) break;
    sp.eigenvalues.push_back(4.0 * std::numbers::pi * std::numbers::pi * static_cast<double>(v));
    sp.multiplicities.push_back(c);
  }
  return sp;
}

SpectralModel sphere2_spectrum(long levels) {
  if (levels < 0) throw ParameterError("spectrum level count must be >= 0");
  SpectralModel sp;
  sp.label = "sphere2";
  sp.nu = 2.0;
  for (long j = 0; j <= levels; ++j) {
    sp.eigenvalues.push_back(static_cast<double>(j) * static_cast<double>(j + 1));
    sp.multiplicities.push_back(2 * j + 1);
  }
  return sp;
}

std::vector<double> resolvent_power_eigenvalues(const SpectralModel& sp, double alpha) {
  validate(sp);
  std::vector<double> mu;
  mu.reserve(sp.levels());
  for (double e : sp.eigenvalues) mu.push_back(std::pow(1.0 + e, -alpha / sp.nu));
  return mu;
}

namespace {

class SpectralPowerCache {
 public:
  SpectralPowerCache(const SpectralModel& sp, double alpha)
      : base_(resolvent_power_eigenvalues(sp, alpha)), weight_(sp.multiplicities) {}

  Complex trace(int m) {
    if (m < 1) throw ParameterError("trace power order must be >= 1, got " + std::to_string(m));
    while (static_cast<int>(traces_.size()) < m) {
      if (traces_.empty()) {
        power_ = base_;
      } else {
        for (std::size_t j = 0; j < base_.size(); ++j) power_[j] *= base_[j];
      }
      double acc = 0.0;
      for (std::size_t j = 0; j < power_.size(); ++j) acc += static_cast<double>(weight_[j]) * power_[j];
      traces_.push_back(acc);
    }
    return traces_[static_cast<std::size_t>(m - 1)];
  }

 private:
  std::vector<double> base_;
  std::vector<long> weight_;
  std::vector<double> power_;
  std::vector<double> traces_;
};

}  // namespace

TracePowerSource manifold_trace_source(const SpectralModel& sp, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive");
  auto cache = std::make_shared<SpectralPowerCache>(sp, alpha);
  TracePowerSource src;
  src.trace_power = [cache](int m) { return cache->trace(m); };
  src.label = sp.label;
  return src;
}

double weyl_tail_check(const SpectralModel& sp, double alpha, long levels) {
  if (levels < 10) throw ParameterError("weyl_tail_check needs J >= 10, got " + std::to_string(levels));
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive");
  const auto mu = resolvent_power_eigenvalues(sp, alpha);
  const long last = std::min<long>(levels, static_cast<long>(mu.size()) - 1);
  double total = 0.0, tail = 0.0;
  for (long j = 0; j <= last; ++j) {
    const double v = static_cast<double>(sp.multiplicities[static_cast<std::size_t>(j)]) * mu[static_cast<std::size_t>(j)];
    total += v;
    if (2 * j > levels) tail += v;
  }
  return total == 0.0 ? 0.0 : tail / total;
}

DetResult manifold_determinant(const SpectralModel& sp, double alpha, Complex lambda, int order, double tol,
                               std::optional<int> manifold_dim) {
  validate(sp);
  DetResult out = plemelj_det(manifold_trace_source(sp, alpha), lambda, order, tol);
  out.cutoff_used = static_cast<long>(sp.levels()) - 1;
  if (manifold_dim && alpha <= *manifold_dim) {
    std::ostringstream os;
    os << "alpha = " << alpha << " <= manifold dimension " << *manifold_dim
       << "; (I+E)^(-alpha/nu) need not be trace class";
    out.warnings.push_back(os.str());
  }
  const long top = static_cast<long>(sp.levels()) - 1;
  if (top >= 10) {
    const double ratio = weyl_tail_check(sp, alpha, top);
    if (ratio >= 0.05) {
      std::ostringstream os;
      os << "spectral tail ratio " << ratio << " >= 0.05 at J = " << top << "; truncated trace converges slowly or diverges";
      out.warnings.push_back(os.str());
    }
  }
  return out;
}

}  // namespace specdet
