#include "specdet/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "specdet/errors.hpp"

namespace specdet {

namespace {

std::string format_point(std::span<const long> p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
  os << ')';
  return os.str();
}

void require_cutoff(long cutoff) {
  if (cutoff < 1) throw ParameterError("cutoff must be >= 1, got " + std::to_string(cutoff));
}

void require_dim(int dim, std::span<const long> p, const char* what) {
  if (static_cast<int>(p.size()) != dim) {
    throw ShapeError(std::string(what) + ": point " + format_point(p) + " has dimension " + std::to_string(p.size()) +
                     ", expected " + std::to_string(dim));
  }
}

// Compressed sparse rows with ascending column indices inside each row.
struct SparseRows {
  std::size_t n = 0;
  std::vector<std::size_t> start{0};
  std::vector<std::size_t> col;
  std::vector<Complex> val;

  bool is_diagonal() const {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t e = start[i]; e < start[i + 1]; ++e)
        if (col[e] != i) return false;
    return true;
  }

  Complex diagonal_sum() const {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto first = col.begin() + static_cast<std::ptrdiff_t>(start[i]);
      auto last = col.begin() + static_cast<std::ptrdiff_t>(start[i + 1]);
      auto it = std::lower_bound(first, last, i);
      if (it != last && *it == i) acc += val[static_cast<std::size_t>(it - col.begin())];
    }
    return acc;
  }
};

SparseRows build_sparse(const LatticeKernel& k, long cutoff) {
  SparseRows s;
  s.n = BoxIndex(k.dim(), cutoff).size();
  s.start.reserve(s.n + 1);
  std::size_t current_row = 0;
  for_each_entry(k, cutoff, [&](std::size_t row, std::size_t c, Complex v) {
    while (current_row < row) {
      s.start.push_back(s.col.size());
      ++current_row;
    }
    if (v == Complex(0.0)) return;
    s.col.push_back(c);
    s.val.push_back(v);
  });
  while (s.start.size() < s.n + 1) s.start.push_back(s.col.size());
  return s;
}

// Row i of the product accumulates contributions in ascending order of the
// inner index, then emits columns in ascending order.
SparseRows multiply(const SparseRows& p, const SparseRows& a) {
  SparseRows out;
  out.n = p.n;
  out.start.reserve(p.n + 1);
  std::vector<Complex> acc(p.n);
  std::vector<char> mark(p.n, 0);
  std::vector<std::size_t> touched;
  for (std::size_t i = 0; i < p.n; ++i) {
    touched.clear();
    for (std::size_t e = p.start[i]; e < p.start[i + 1]; ++e) {
      const std::size_t kk = p.col[e];
      const Complex pv = p.val[e];
      for (std::size_t f = a.start[kk]; f < a.start[kk + 1]; ++f) {
        const std::size_t j = a.col[f];
        if (!mark[j]) {
          mark[j] = 1;
          acc[j] = 0.0;
          touched.push_back(j);
        }
        acc[j] += pv * a.val[f];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::size_t j : touched) {
      mark[j] = 0;
      if (acc[j] == Complex(0.0)) continue;
      out.col.push_back(j);
      out.val.push_back(acc[j]);
    }
    out.start.push_back(out.col.size());
  }
  return out;
}

// Tr(A^m) for m = 1, 2, ... computed by advancing P = A^m one factor at a
// time. Diagonal truncations take an elementwise path.
class PowerTraceCache {
 public:
  PowerTraceCache(const LatticeKernel& k, long cutoff) : a_(build_sparse(k, cutoff)) {
    diagonal_ = a_.is_diagonal();
    if (diagonal_) {
      base_.assign(a_.n, Complex(0.0));
      for (std::size_t i = 0; i < a_.n; ++i)
        if (a_.start[i] < a_.start[i + 1]) base_[i] = a_.val[a_.start[i]];
      power_ = base_;
    }
  }

  Complex trace(int m) {
    if (m < 1) throw ParameterError("trace power order must be >= 1, got " + std::to_string(m));
    while (static_cast<int>(traces_.size()) < m) advance();
    return traces_[static_cast<std::size_t>(m - 1)];
  }

 private:
  void advance() {
    if (diagonal_) {
      if (!traces_.empty())
        for (std::size_t i = 0; i < power_.size(); ++i) power_[i] *= base_[i];
      Complex acc = 0.0;
      for (const auto& z : power_) acc += z;
      traces_.push_back(acc);
      return;
    }
    if (traces_.empty()) {
      p_ = a_;
    } else {
      p_ = multiply(p_, a_);
    }
    traces_.push_back(p_.diagonal_sum());
  }

  SparseRows a_;
  SparseRows p_;
  bool diagonal_ = false;
  std::vector<Complex> base_;
  std::vector<Complex> power_;
  std::vector<Complex> traces_;
};

}  // namespace

long sup_norm(std::span<const long> p) noexcept {
  long best = 0;
  for (long c : p) best = std::max(best, c < 0 ? -c : c);
  return best;
}

BoxIndex::BoxIndex(int dim, long cutoff) : dim_(dim), cutoff_(cutoff) {
  if (dim < 1) throw ParameterError("lattice dimension must be >= 1");
  if (cutoff < 0) throw ParameterError("box radius must be >= 0");
  side_ = static_cast<std::size_t>(2 * cutoff + 1);
  size_ = 1;
  for (int d = 0; d < dim; ++d) size_ *= side_;
}

Point BoxIndex::point(std::size_t idx) const {
  Point p(static_cast<std::size_t>(dim_));
  for (int d = dim_ - 1; d >= 0; --d) {
    p[static_cast<std::size_t>(d)] = static_cast<long>(idx % side_) - cutoff_;
    idx /= side_;
  }
  return p;
}

std::optional<std::size_t> BoxIndex::index(std::span<const long> p) const {
  if (static_cast<int>(p.size()) != dim_) return std::nullopt;
  std::size_t idx = 0;
  for (long c : p) {
    if (c < -cutoff_ || c > cutoff_) return std::nullopt;
    idx = idx * side_ + static_cast<std::size_t>(c + cutoff_);
  }
  return idx;
}

LatticeKernel::LatticeKernel(int dim, Eval eval, std::optional<long> declared_support, std::string label,
                             RowSupport row_support)
    : dim_(dim),
      eval_(std::move(eval)),
      declared_support_(declared_support),
      label_(std::move(label)),
      row_support_(std::move(row_support)) {
  if (dim_ < 1) throw ParameterError("lattice dimension must be >= 1");
  if (!eval_) throw ParameterError("lattice kernel needs an evaluation rule");
  if (declared_support_ && *declared_support_ < 0) throw ParameterError("declared support must be >= 0");
}

void for_each_entry(const LatticeKernel& k, long cutoff,
                    const std::function<void(std::size_t row, std::size_t col, Complex v)>& visit) {
  require_cutoff(cutoff);
  const BoxIndex box(k.dim(), cutoff);
  std::vector<std::size_t> cols;
  for (std::size_t r = 0; r < box.size(); ++r) {
    const Point i = box.point(r);
    if (k.declared_support() && sup_norm(i) > *k.declared_support()) continue;
    cols.clear();
    if (k.has_row_support()) {
      for (const Point& j : k.row_support(i))
        if (auto c = box.index(j)) cols.push_back(*c);
      std::sort(cols.begin(), cols.end());
      cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    } else {
      cols.resize(box.size());
      for (std::size_t c = 0; c < box.size(); ++c) cols[c] = c;
    }
    for (std::size_t c : cols) {
      const Point j = box.point(c);
      if (k.declared_support() && sup_norm(j) > *k.declared_support()) continue;
      const Complex v = k(i, j);
      if (!is_finite(v)) {
        throw EvaluationError("kernel '" + k.label() + "' is not finite at " + format_point(i) + "," +
                              format_point(j));
      }
      visit(r, c, v);
    }
  }
}

double nuclear_norm_estimate(const LatticeKernel& k, double p, long cutoff) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("nuclear norm exponent must lie in [1, inf)");
  double total = 0.0;
  double row_sum = 0.0;
  std::size_t current = 0;
  bool have_row = false;
  auto flush = [&] {
    if (have_row) total += (p == 1.0) ? row_sum : std::pow(row_sum, 1.0 / p);
    row_sum = 0.0;
    have_row = false;
  };
  for_each_entry(k, cutoff, [&](std::size_t row, std::size_t, Complex v) {
    if (row != current) {
      flush();
      current = row;
    }
    have_row = true;
    row_sum += (p == 1.0) ? std::abs(v) : std::pow(std::abs(v), p);
  });
  flush();
  return total;
}

Complex lattice_trace(const LatticeKernel& k, long cutoff) {
  require_cutoff(cutoff);
  const BoxIndex box(k.dim(), cutoff);
  Complex acc = 0.0;
  for (std::size_t r = 0; r < box.size(); ++r) {
    const Point n = box.point(r);
    if (k.declared_support() && sup_norm(n) > *k.declared_support()) continue;
    const Complex v = k(n, n);
    if (!is_finite(v)) {
      throw EvaluationError("kernel '" + k.label() + "' is not finite at " + format_point(n) + "," +
                            format_point(n));
    }
    acc += v;
  }
  return acc;
}

Complex cycle_trace(const LatticeKernel& k, int m, long cutoff) {
  if (m < 1) throw ParameterError("cycle_trace order must be >= 1, got " + std::to_string(m));
  require_cutoff(cutoff);
  if (m == 1) return lattice_trace(k, cutoff);
  PowerTraceCache cache(k, cutoff);
  return cache.trace(m);
}

TracePowerSource lattice_trace_source(const LatticeKernel& k, long cutoff) {
  require_cutoff(cutoff);
  auto cache = std::make_shared<PowerTraceCache>(k, cutoff);
  TracePowerSource src;
  src.trace_power = [cache](int m) { return cache->trace(m); };
  src.label = k.label();
  return src;
}

DetResult lattice_determinant(const LatticeKernel& k, Complex lambda, int order, long cutoff, double tol) {
  if (order < 1) throw ParameterError("series order must be >= 1, got " + std::to_string(order));
  require_cutoff(cutoff);
  const double norm = nuclear_norm_estimate(k, 1.0, cutoff);
  TracePowerSource src = lattice_trace_source(k, cutoff);
  src.norm_hint = norm;
  DetResult out = plemelj_det(src, lambda, order, tol);
  out.cutoff_used = cutoff;
  if (std::abs(lambda) * norm >= 1.0) {
    out.warnings.insert(out.warnings.begin(), "|lambda| * nuclear norm = " + std::to_string(std::abs(lambda) * norm) +
                                                  " >= 1; series convergence is not guaranteed");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Built-in families

namespace {

using PointMap = std::map<Point, Complex>;

PointMap collect(int dim, const std::vector<std::pair<Point, Complex>>& entries, const char* what) {
  PointMap out;
  for (const auto& [p, v] : entries) {
    require_dim(dim, p, what);
    if (!is_finite(v)) throw EvaluationError(std::string(what) + ": non-finite value at " + format_point(p));
    out[p] += v;
  }
  return out;
}

long max_extent(const PointMap& m) {
  long r = 0;
  for (const auto& [p, v] : m) r = std::max(r, sup_norm(p));
  return r;
}

Complex lookup(const PointMap& m, std::span<const long> p) {
  auto it = m.find(Point(p.begin(), p.end()));
  return it == m.end() ? Complex(0.0) : it->second;
}

bool equal_points(std::span<const long> a, std::span<const long> b) { return std::ranges::equal(a, b); }

}  // namespace

LatticeKernel zero_kernel(int dim, std::string label) {
  return LatticeKernel(
      dim, [](std::span<const long>, std::span<const long>) { return Complex(0.0); }, 0L, std::move(label),
      [](std::span<const long>) { return std::vector<Point>{}; });
}

LatticeKernel diagonal_kernel(int dim, std::vector<std::pair<Point, Complex>> entries, std::string label) {
  auto diag = std::make_shared<PointMap>(collect(dim, entries, "diagonal kernel"));
  const long support = max_extent(*diag);
  return LatticeKernel(
      dim,
      [diag](std::span<const long> i, std::span<const long> j) {
        return equal_points(i, j) ? lookup(*diag, i) : Complex(0.0);
      },
      support, std::move(label),
      [diag](std::span<const long> i) {
        std::vector<Point> out;
        if (diag->count(Point(i.begin(), i.end()))) out.emplace_back(i.begin(), i.end());
        return out;
      });
}

LatticeKernel diagonal_decay_kernel(int dim, Complex coeff, double exponent, bool half_line, std::optional<long> support,
                                    std::string label) {
  if (!is_finite(coeff) || !std::isfinite(exponent)) throw ParameterError("diagonal decay parameters must be finite");
  auto active = [half_line](std::span<const long> i) {
    if (half_line) return std::ranges::all_of(i, [](long c) { return c >= 1; });
    return sup_norm(i) != 0;
  };
  return LatticeKernel(
      dim,
      [=](std::span<const long> i, std::span<const long> j) {
        if (!equal_points(i, j) || !active(i)) return Complex(0.0);
        if (support && sup_norm(i) > *support) return Complex(0.0);
        return coeff * std::pow(static_cast<double>(sup_norm(i)), exponent);
      },
      support, std::move(label),
      [=](std::span<const long> i) {
        std::vector<Point> out;
        if (active(i)) out.emplace_back(i.begin(), i.end());
        return out;
      });
}

LatticeKernel rank_one_kernel(int dim, std::vector<std::pair<Point, Complex>> u,
                              std::vector<std::pair<Point, Complex>> v, std::string label) {
  auto left = std::make_shared<PointMap>(collect(dim, u, "rank-one kernel u"));
  auto right = std::make_shared<PointMap>(collect(dim, v, "rank-one kernel v"));
  const long support = std::max(max_extent(*left), max_extent(*right));
  return LatticeKernel(
      dim,
      [left, right](std::span<const long> i, std::span<const long> j) { return lookup(*left, i) * lookup(*right, j); },
      support, std::move(label),
      [left, right](std::span<const long> i) {
        std::vector<Point> out;
        if (left->count(Point(i.begin(), i.end())))
          for (const auto& [p, val] : *right) out.push_back(p);
        return out;
      });
}

LatticeKernel banded_kernel(int dim, std::vector<std::pair<Point, Complex>> bands, double decay_exponent,
                            std::optional<long> support, std::string label) {
  if (!std::isfinite(decay_exponent)) throw ParameterError("banded kernel decay exponent must be finite");
  auto offsets = std::make_shared<PointMap>(collect(dim, bands, "banded kernel"));
  return LatticeKernel(
      dim,
      [offsets, decay_exponent, support](std::span<const long> i, std::span<const long> j) {
        if (support && (sup_norm(i) > *support || sup_norm(j) > *support)) return Complex(0.0);
        Point d(i.size());
        for (std::size_t c = 0; c < i.size(); ++c) d[c] = i[c] - j[c];
        const Complex b = lookup(*offsets, d);
        if (b == Complex(0.0)) return b;
        return b * std::pow(1.0 + static_cast<double>(sup_norm(j)), decay_exponent);
      },
      support, std::move(label),
      [offsets](std::span<const long> i) {
        std::vector<Point> out;
        for (const auto& [d, b] : *offsets) {
          Point j(i.size());
          for (std::size_t c = 0; c < i.size(); ++c) j[c] = i[c] - d[c];
          out.push_back(std::move(j));
        }
        return out;
      });
}

LatticeKernel table_kernel(int dim, std::vector<TableEntry> entries, std::string label) {
  auto table = std::make_shared<std::map<std::pair<Point, Point>, Complex>>();
  auto rows = std::make_shared<std::map<Point, std::vector<Point>>>();
  long support = 0;
  for (auto& e : entries) {
    require_dim(dim, e.row, "table kernel");
    require_dim(dim, e.col, "table kernel");
    if (!is_finite(e.value)) {
      throw EvaluationError("table kernel: non-finite value at " + format_point(e.row) + "," + format_point(e.col));
    }
    support = std::max({support, sup_norm(e.row), sup_norm(e.col)});
    auto [it, inserted] = table->try_emplace({e.row, e.col}, Complex(0.0));
    it->second += e.value;
    if (inserted) (*rows)[e.row].push_back(e.col);
  }
  return LatticeKernel(
      dim,
      [table](std::span<const long> i, std::span<const long> j) {
        auto it = table->find({Point(i.begin(), i.end()), Point(j.begin(), j.end())});
        return it == table->end() ? Complex(0.0) : it->second;
      },
      support, std::move(label),
      [rows](std::span<const long> i) {
        auto it = rows->find(Point(i.begin(), i.end()));
        return it == rows->end() ? std::vector<Point>{} : it->second;
      });
}

}  // namespace specdet
