#include "specdet/toroidal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include "specdet/errors.hpp"

namespace specdet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_point(std::span<const long> p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
  os << ')';
  return os.str();
}

// roots[g] = exp(-2 pi i g / N).
std::vector<Complex> inverse_roots(int n) {
  std::vector<Complex> roots(static_cast<std::size_t>(n));
  for (int g = 0; g < n; ++g) roots[static_cast<std::size_t>(g)] = std::polar(1.0, -kTwoPi * g / n);
  return roots;
}

std::size_t wrap(long v, int n) {
  const long r = v % n;
  return static_cast<std::size_t>(r < 0 ? r + n : r);
}

double euclidean_norm(std::span<const long> k) {
  double s = 0.0;
  for (long c : k) s += static_cast<double>(c) * static_cast<double>(c);
  return std::sqrt(s);
}

// Samples sigma(., k) on the grid and returns the coefficients
// sigma_hat(l, k) for |l|_inf <= lmax, laid out lexicographically over
// l in [-lmax, lmax]^n. The transform is applied one axis at a time.
std::vector<Complex> grid_coefficients(const ToroidalSymbol& s, std::span<const long> k, long lmax,
                                       const std::vector<Complex>& roots) {
  const int n = s.dim();
  const int grid = s.x_grid();
  const std::size_t gsize = static_cast<std::size_t>(grid);
  const std::size_t width = static_cast<std::size_t>(2 * lmax + 1);

  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= gsize;
  std::vector<Complex> data(total);
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<std::size_t> g(static_cast<std::size_t>(n), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (int d = 0; d < n; ++d) x[static_cast<std::size_t>(d)] = static_cast<double>(g[static_cast<std::size_t>(d)]) / grid;
    const Complex v = s(x, k);
    if (!is_finite(v)) {
      throw EvaluationError("symbol '" + s.label() + "' is not finite at k=" + format_point(k));
    }
    data[idx] = v;
    for (int d = n - 1; d >= 0; --d) {
      if (++g[static_cast<std::size_t>(d)] < gsize) break;
      g[static_cast<std::size_t>(d)] = 0;
    }
  }

  // shape[d] is the current extent of axis d (grid before, width after).
  std::vector<std::size_t> shape(static_cast<std::size_t>(n), gsize);
  for (int axis = 0; axis < n; ++axis) {
    std::size_t outer = 1, inner = 1;
    for (int d = 0; d < axis; ++d) outer *= shape[static_cast<std::size_t>(d)];
    for (int d = axis + 1; d < n; ++d) inner *= shape[static_cast<std::size_t>(d)];
    std::vector<Complex> next(outer * width * inner);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < inner; ++i) {
        for (std::size_t w = 0; w < width; ++w) {
          const long l = static_cast<long>(w) - lmax;
          Complex acc = 0.0;
          for (std::size_t gg = 0; gg < gsize; ++gg) {
            acc += data[(o * gsize + gg) * inner + i] * roots[wrap(static_cast<long>(gg) * l, grid)];
          }
          next[(o * width + w) * inner + i] = acc / static_cast<double>(grid);
        }
      }
    }
    data = std::move(next);
    shape[static_cast<std::size_t>(axis)] = width;
  }
  return data;
}

}  // namespace

ToroidalSymbol::ToroidalSymbol(int dim, std::optional<double> order, Eval eval, int x_grid, std::string label,
                               std::optional<int> x_bandwidth)
    : dim_(dim),
      order_(order),
      eval_(std::move(eval)),
      x_grid_(x_grid),
      label_(std::move(label)),
      x_bandwidth_(x_bandwidth) {
  if (dim_ < 1) throw ParameterError("symbol dimension must be >= 1");
  if (x_grid_ < 1) throw ParameterError("x_grid must be >= 1");
  if (!eval_) throw ParameterError("symbol needs an evaluation rule");
  if (order_ && !std::isfinite(*order_)) throw ParameterError("symbol order must be finite");
  if (x_bandwidth_ && *x_bandwidth_ < 0) throw ParameterError("x bandwidth must be >= 0");
}

ToroidalSymbol ToroidalSymbol::with_grid(int x_grid) const {
  return ToroidalSymbol(dim_, order_, eval_, x_grid, label_, x_bandwidth_);
}

int default_x_grid(long cutoff) {
  const long want = 4 * (2 * cutoff + 1);
  int grid = 1;
  while (grid < want) grid *= 2;
  return grid;
}

Complex symbol_fourier_coeff(const ToroidalSymbol& s, std::span<const long> l, std::span<const long> k) {
  const int n = s.dim();
  if (static_cast<int>(l.size()) != n || static_cast<int>(k.size()) != n) {
    throw ShapeError("symbol_fourier_coeff: index dimension does not match symbol dimension " + std::to_string(n));
  }
  const int grid = s.x_grid();
  if (2 * sup_norm(l) >= grid) {
    throw AliasingError("mode " + format_point(l) + " is not resolved by a grid of " + std::to_string(grid) +
                        " points (need |l|_inf < " + std::to_string(grid) + "/2)");
  }
  const auto roots = inverse_roots(grid);
  const std::size_t gsize = static_cast<std::size_t>(grid);
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= gsize;
  std::vector<std::size_t> g(static_cast<std::size_t>(n), 0);
  std::vector<double> x(static_cast<std::size_t>(n));
  Complex acc = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    long phase = 0;
    for (int d = 0; d < n; ++d) {
      const auto du = static_cast<std::size_t>(d);
      x[du] = static_cast<double>(g[du]) / grid;
      phase += static_cast<long>(g[du]) * l[du];
    }
    const Complex v = s(x, k);
    if (!is_finite(v)) throw EvaluationError("symbol '" + s.label() + "' is not finite at k=" + format_point(k));
    acc += v * roots[wrap(phase, grid)];
    for (int d = n - 1; d >= 0; --d) {
      if (++g[static_cast<std::size_t>(d)] < gsize) break;
      g[static_cast<std::size_t>(d)] = 0;
    }
  }
  return acc / static_cast<double>(total);
}

LatticeKernel toroidal_matrix(const ToroidalSymbol& s, long cutoff) {
  if (cutoff < 1) throw ParameterError("cutoff must be >= 1, got " + std::to_string(cutoff));
  const int n = s.dim();
  const std::optional<int> band = s.x_bandwidth();
  // Modes that are computed; with a declared bandwidth D only the ring
  // D + 1 is needed beyond the band itself.
  const long lmax = band ? std::min<long>(2 * cutoff, *band + 1) : 2 * cutoff;
  if (2 * lmax >= s.x_grid()) {
    throw AliasingError("toroidal_matrix needs modes up to |l|_inf = " + std::to_string(lmax) + " but the grid has " +
                        std::to_string(s.x_grid()) + " points per axis (need more than " + std::to_string(2 * lmax) +
                        ")");
  }
  const long keep = band ? std::min<long>(lmax, *band) : lmax;

  const BoxIndex box(n, cutoff);
  const BoxIndex modes(n, lmax);
  const auto roots = inverse_roots(s.x_grid());
  const std::size_t size = box.size();

  // rows[j] holds (column index, value) pairs in ascending column order.
  auto rows = std::make_shared<std::vector<std::vector<std::pair<std::size_t, Complex>>>>(size);
  for (std::size_t c = 0; c < size; ++c) {
    const Point k = box.point(c);
    const std::vector<Complex> coeff = grid_coefficients(s, k, lmax, roots);
    double scale = 0.0;
    if (band && keep < lmax) {
      for (std::size_t m = 0; m < modes.size(); ++m)
        if (sup_norm(modes.point(m)) <= keep) scale = std::max(scale, std::abs(coeff[m]));
      for (std::size_t m = 0; m < modes.size(); ++m) {
        const Point l = modes.point(m);
        if (sup_norm(l) > keep && std::abs(coeff[m]) > 1e-12 * std::max(1.0, scale)) {
          throw ModelError("symbol '" + s.label() + "' declares x-bandwidth " + std::to_string(*band) +
                           " but sigma_hat" + format_point(l) + "," + format_point(k) + " has modulus " +
                           std::to_string(std::abs(coeff[m])));
        }
      }
    }
    // Columns are visited in ascending order, so every row stays sorted.
    Point j(k.size());
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const Point l = modes.point(m);
      if (sup_norm(l) > keep) continue;
      for (std::size_t d = 0; d < j.size(); ++d) j[d] = k[d] + l[d];
      if (const auto r = box.index(j)) (*rows)[*r].emplace_back(c, coeff[m]);
    }
  }

  auto index = std::make_shared<BoxIndex>(box);
  auto eval = [rows, index](std::span<const long> j, std::span<const long> k) {
    const auto r = index->index(j);
    const auto c = index->index(k);
    if (!r || !c) return Complex(0.0);
    const auto& row = (*rows)[*r];
    auto it = std::lower_bound(row.begin(), row.end(), *c, [](const auto& e, std::size_t v) { return e.first < v; });
    return (it != row.end() && it->first == *c) ? it->second : Complex(0.0);
  };
  auto support = [rows, index](std::span<const long> j) {
    std::vector<Point> out;
    if (const auto r = index->index(j)) {
      for (const auto& [c, v] : (*rows)[*r]) out.push_back(index->point(c));
    }
    return out;
  };
  return LatticeKernel(n, std::move(eval), cutoff, s.label(), std::move(support));
}

double poincare_norm(const LatticeKernel& k, long cutoff) {
  double total = 0.0;
  for_each_entry(k, cutoff, [&](std::size_t, std::size_t, Complex v) { total += std::abs(v); });
  return total;
}

double schur_bound(const LatticeKernel& k, double p, long cutoff) {
  if (!(p >= 1.0)) throw ParameterError("Schur exponent must lie in [1, inf]");
  const std::size_t size = BoxIndex(k.dim(), cutoff).size();
  std::vector<double> row_sum(size, 0.0), col_sum(size, 0.0);
  for_each_entry(k, cutoff, [&](std::size_t r, std::size_t c, Complex v) {
    row_sum[r] += std::abs(v);
    col_sum[c] += std::abs(v);
  });
  const double col_max = *std::max_element(col_sum.begin(), col_sum.end());
  const double row_max = *std::max_element(row_sum.begin(), row_sum.end());
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  if (inv_p == 1.0) return col_max;
  if (inv_p == 0.0) return row_max;
  return std::pow(col_max, inv_p) * std::pow(row_max, 1.0 - inv_p);
}

DetResult toroidal_determinant(const ToroidalSymbol& s, Complex lambda, int order, long cutoff, double tol) {
  if (order < 1) throw ParameterError("series order must be >= 1, got " + std::to_string(order));
  DetResult out = lattice_determinant(toroidal_matrix(s, cutoff), lambda, order, cutoff, tol);
  if (s.order() && *s.order() >= -static_cast<double>(s.dim())) {
    std::ostringstream os;
    os << "declared order " << *s.order() << " is not below -n = " << -s.dim()
       << "; the Poincare norm may diverge as the cutoff grows";
    out.warnings.insert(out.warnings.begin(), os.str());
  }
  return out;
}

const char* to_string(GrowthVerdict v) noexcept {
  return v == GrowthVerdict::converging ? "converging" : "diverging/inconclusive";
}

NormProfile classify_profile(std::vector<std::pair<long, double>> points) {
  NormProfile out;
  out.points = std::move(points);
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    out.increments.push_back(out.points[i].second - out.points[i - 1].second);
  }
  const bool all_zero = std::ranges::all_of(out.increments, [](double d) { return d == 0.0; });
  bool geometric = out.increments.size() >= 2;
  for (std::size_t i = 0; geometric && i + 1 < out.increments.size(); ++i) {
    const double a = out.increments[i], b = out.increments[i + 1];
    if (a == 0.0) {
      geometric = (b == 0.0);
    } else {
      geometric = (b >= 0.0) && (b / a < 0.9);
    }
  }
  out.verdict = (all_zero || geometric) ? GrowthVerdict::converging : GrowthVerdict::diverging_or_inconclusive;
  return out;
}

namespace {

void check_cutoffs(const std::vector<long>& cutoffs) {
  if (cutoffs.empty()) throw ParameterError("norm profile needs at least one cutoff");
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] < 1) throw ParameterError("norm profile cutoffs must be >= 1");
    if (i && cutoffs[i] <= cutoffs[i - 1]) throw ParameterError("norm profile cutoffs must be strictly ascending");
  }
}

}  // namespace

NormProfile norm_growth_profile(const ToroidalSymbol& s, const std::vector<long>& cutoffs) {
  check_cutoffs(cutoffs);
  std::vector<std::pair<long, double>> points;
  for (long r : cutoffs) {
    const ToroidalSymbol sampled = s.with_grid(std::max(s.x_grid(), default_x_grid(r)));
    points.emplace_back(r, poincare_norm(toroidal_matrix(sampled, r), r));
  }
  return classify_profile(std::move(points));
}

NormProfile kernel_norm_profile(const LatticeKernel& k, const std::vector<long>& cutoffs) {
  check_cutoffs(cutoffs);
  std::vector<std::pair<long, double>> points;
  for (long r : cutoffs) points.emplace_back(r, poincare_norm(k, r));
  return classify_profile(std::move(points));
}

// ---------------------------------------------------------------------------
// Built-in families

ToroidalSymbol power_decay_symbol(int dim, Complex coeff, double order, int x_grid, std::string label) {
  if (!is_finite(coeff)) throw ParameterError("power_decay coefficient must be finite");
  return ToroidalSymbol(
      dim, order,
      [coeff, order](std::span<const double>, std::span<const long> k) {
        const double r = euclidean_norm(k);
        return coeff * std::pow(1.0 + r * r, order / 2.0);
      },
      x_grid, std::move(label), 0);
}

ToroidalSymbol sharpness_symbol(int dim, int x_grid, std::string label) {
  return ToroidalSymbol(
      dim, -static_cast<double>(dim),
      [dim](std::span<const double>, std::span<const long> k) {
        return Complex(std::pow(1.0 + euclidean_norm(k), -static_cast<double>(dim)));
      },
      x_grid, std::move(label), 0);
}

ToroidalSymbol modulated_symbol(int dim, std::vector<SymbolMode> modes, double order, int x_grid, std::string label) {
  int band = 0;
  for (const auto& m : modes) {
    if (static_cast<int>(m.theta.size()) != dim) throw ShapeError("modulated symbol: mode dimension mismatch");
    if (!is_finite(m.coeff)) throw ParameterError("modulated symbol: non-finite mode coefficient");
    band = std::max<int>(band, static_cast<int>(sup_norm(m.theta)));
  }
  auto shared = std::make_shared<std::vector<SymbolMode>>(std::move(modes));
  return ToroidalSymbol(
      dim, order,
      [shared, order](std::span<const double> x, std::span<const long> k) {
        Complex acc = 0.0;
        for (const auto& m : *shared) {
          double phase = 0.0;
          for (std::size_t d = 0; d < x.size(); ++d) phase += x[d] * static_cast<double>(m.theta[d]);
          acc += m.coeff * std::polar(1.0, kTwoPi * phase);
        }
        const double r = euclidean_norm(k);
        return acc * std::pow(1.0 + r * r, order / 2.0);
      },
      x_grid, std::move(label), band);
}

ToroidalSymbol custom_table_symbol(int dim, std::vector<SymbolCoefficient> entries, std::optional<double> order,
                                   int x_grid, std::string label) {
  auto by_k = std::make_shared<std::map<Point, std::vector<std::pair<Point, Complex>>>>();
  int band = 0;
  for (auto& e : entries) {
    if (static_cast<int>(e.l.size()) != dim || static_cast<int>(e.k.size()) != dim) {
      throw ShapeError("custom_table symbol: index dimension mismatch");
    }
    if (!is_finite(e.value)) throw ParameterError("custom_table symbol: non-finite coefficient");
    band = std::max<int>(band, static_cast<int>(sup_norm(e.l)));
    (*by_k)[e.k].emplace_back(e.l, e.value);
  }
  return ToroidalSymbol(
      dim, order,
      [by_k](std::span<const double> x, std::span<const long> k) {
        auto it = by_k->find(Point(k.begin(), k.end()));
        if (it == by_k->end()) return Complex(0.0);
        Complex acc = 0.0;
        for (const auto& [l, c] : it->second) {
          double phase = 0.0;
          for (std::size_t d = 0; d < x.size(); ++d) phase += x[d] * static_cast<double>(l[d]);
          acc += c * std::polar(1.0, kTwoPi * phase);
        }
        return acc;
      },
      x_grid, std::move(label), band);
}

}  // namespace specdet
