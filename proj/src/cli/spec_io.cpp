#include "specdet/spec_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace specdet::cli {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
  throw SpecError(SpecError::Category::validation, field + ": " + message, field);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  for (const auto& item : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return item.key() == a; })) {
      invalid(join(path, item.key()), "unknown field");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) invalid(join(path, key), "required field is missing");
  return *it;
}

const json* optional_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) invalid(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(field, "number is not finite");
  return v;
}

long get_int(const json& j, const std::string& field, long min_value) {
  if (!j.is_number_integer()) invalid(field, "expected an integer");
  const long v = j.get<long>();
  if (v < min_value) invalid(field, "must be >= " + std::to_string(min_value));
  return v;
}

Complex get_complex(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) invalid(field, "expected a complex number [re, im]");
  return {get_number(j[0], at(field, 0)), get_number(j[1], at(field, 1))};
}

const json& get_array(const json& j, const std::string& field) {
  if (!j.is_array()) invalid(field, "expected an array");
  return j;
}

// [p_1 .. p_dim, re, im] -> (p, value); with two point groups when npoints == 2.
struct PointRecord {
  Point first;
  Point second;
  Complex value;
};

PointRecord get_point_record(const json& j, int dim, int npoints, const std::string& field) {
  const std::size_t expect = static_cast<std::size_t>(dim * npoints + 2);
  if (!j.is_array() || j.size() != expect) {
    invalid(field, "expected " + std::to_string(expect) + " numbers (" + std::to_string(npoints) + " index group" +
                       (npoints > 1 ? "s" : "") + " of dimension " + std::to_string(dim) + ", then re, im)");
  }
  PointRecord rec;
  for (int p = 0; p < dim * npoints; ++p) {
    const long c = get_int(j[static_cast<std::size_t>(p)], at(field, static_cast<std::size_t>(p)), std::numeric_limits<long>::min());
    (p < dim ? rec.first : rec.second).push_back(c);
  }
  rec.value = {get_number(j[expect - 2], at(field, expect - 2)), get_number(j[expect - 1], at(field, expect - 1))};
  return rec;
}

std::vector<std::pair<Point, Complex>> get_point_list(const json& j, int dim, const std::string& field) {
  std::vector<std::pair<Point, Complex>> out;
  const json& arr = get_array(j, field);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    auto rec = get_point_record(arr[i], dim, 1, at(field, i));
    out.emplace_back(std::move(rec.first), rec.value);
  }
  return out;
}

CMatrix get_matrix(const json& j, const std::string& field) {
  const json& rows = get_array(j, field);
  const std::size_t n = rows.size();
  if (n == 0) invalid(field, "matrix must have at least one row");
  std::size_t cols = 0;
  std::vector<Complex> data;
  for (std::size_t r = 0; r < n; ++r) {
    const json& row = get_array(rows[r], at(field, r));
    if (r == 0) cols = row.size();
    if (row.size() != cols) invalid(at(field, r), "ragged matrix row");
    for (std::size_t c = 0; c < row.size(); ++c) data.push_back(get_complex(row[c], at(at(field, r), c)));
  }
  if (cols != n) invalid(field, "matrix is " + std::to_string(n) + "x" + std::to_string(cols) + ", expected square");
  return CMatrix(n, cols, std::move(data));
}

int get_dim(const json& params) { return static_cast<int>(get_int(require(params, "dim", ""), "dim", 1)); }

std::string family_of(const json& params, std::initializer_list<const char*> known) {
  const json& f = require(params, "family", "");
  if (!f.is_string()) invalid("family", "expected a string");
  const auto name = f.get<std::string>();
  if (std::none_of(known.begin(), known.end(), [&](const char* k) { return name == k; })) {
    std::string list;
    for (const char* k : known) list += (list.empty() ? "" : ", ") + std::string(k);
    invalid("family", "unknown family '" + name + "' (expected one of " + list + ")");
  }
  return name;
}

void require_kind(const OperatorSpec& spec, OperatorKind kind) {
  if (spec.kind != kind) {
    invalid("kind", std::string("expected ") + to_string(kind) + ", got " + to_string(spec.kind));
  }
}

std::string display_label(const OperatorSpec& spec, const std::string& fallback) {
  return spec.label.empty() ? fallback : spec.label;
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

void validate(const OperatorSpec& spec) {
  try {
    switch (spec.kind) {
      case OperatorKind::lattice_kernel:
        (void)build_kernel(spec);
        break;
      case OperatorKind::toroidal_symbol:
        (void)build_symbol(spec, 1);
        break;
      case OperatorKind::block_symbol:
        (void)build_block_symbol(spec);
        break;
      case OperatorKind::spectral_model:
        (void)build_spectral_model(spec);
        (void)spectral_alpha(spec);
        break;
      case OperatorKind::bundle_symbol:
        (void)build_bundle_symbol(spec);
        break;
    }
  } catch (const SpecError&) {
    throw;
  } catch (const Error& e) {
    throw SpecError(SpecError::Category::validation, e.what(), to_string(spec.kind));
  }
}

}  // namespace

const char* to_string(OperatorKind k) noexcept {
  switch (k) {
    case OperatorKind::lattice_kernel: return "lattice_kernel";
    case OperatorKind::toroidal_symbol: return "toroidal_symbol";
    case OperatorKind::block_symbol: return "block_symbol";
    case OperatorKind::spectral_model: return "spectral_model";
    case OperatorKind::bundle_symbol: return "bundle_symbol";
  }
  return "unknown";
}

std::optional<OperatorKind> kind_from_string(std::string_view s) noexcept {
  for (auto k : {OperatorKind::lattice_kernel, OperatorKind::toroidal_symbol, OperatorKind::block_symbol,
                 OperatorKind::spectral_model, OperatorKind::bundle_symbol}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

OperatorSpec parse_spec_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    if (auto pos = what.find(": ", what.find("parse error")); pos != std::string::npos) what = what.substr(pos + 2);
    throw SpecError(SpecError::Category::syntax,
                    "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what, {}, line,
                    column);
  } catch (const json::out_of_range& e) {
    throw SpecError(SpecError::Category::syntax, "number out of range", {});
  }
  if (!doc.is_object()) invalid("<root>", "spec must be a JSON object");

  OperatorSpec spec;
  const json& kind = require(doc, "kind", "");
  if (!kind.is_string()) invalid("kind", "expected a string");
  auto k = kind_from_string(kind.get<std::string>());
  if (!k) invalid("kind", "unknown kind '" + kind.get<std::string>() + "'");
  spec.kind = *k;

  for (const auto& item : doc.items()) {
    const std::string& key = item.key();
    if (key == "kind") continue;
    if (key == "label") {
      if (!item.value().is_string()) invalid("label", "expected a string");
      spec.label = item.value().get<std::string>();
    } else if (key == "order") {
      spec.order = get_number(item.value(), "order");
    } else if (key == "manifold_dim") {
      spec.manifold_dim = static_cast<int>(get_int(item.value(), "manifold_dim", 1));
    } else {
      spec.params[key] = item.value();
    }
  }
  validate(spec);
  return spec;
}

OperatorSpec parse_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) invalid("input", "cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_spec_text(buffer.str());
}

std::string emit_spec(const OperatorSpec& spec) {
  json doc = json::object();
  doc["kind"] = to_string(spec.kind);
  if (!spec.label.empty()) doc["label"] = spec.label;
  if (spec.order) doc["order"] = *spec.order;
  if (spec.manifold_dim) doc["manifold_dim"] = *spec.manifold_dim;
  for (const auto& item : spec.params.items()) doc[item.key()] = item.value();
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// lattice_kernel

LatticeKernel build_kernel(const OperatorSpec& spec) {
  require_kind(spec, OperatorKind::lattice_kernel);
  const json& p = spec.params;
  const std::string family = family_of(p, {"diagonal", "rank_one", "banded", "table"});
  const int dim = get_dim(p);
  std::optional<long> support;
  if (const json* s = optional_field(p, "support")) support = get_int(*s, "support", 0);
  const std::string label = display_label(spec, family);

  if (family == "diagonal") {
    check_keys(p, {"family", "dim", "support", "entries", "decay"}, "");
    const json* entries = optional_field(p, "entries");
    const json* decay = optional_field(p, "decay");
    if ((entries == nullptr) == (decay == nullptr)) invalid("entries", "diagonal family needs exactly one of entries, decay");
    if (entries) {
      if (support) invalid("support", "support is derived from the entries of a diagonal table");
      return diagonal_kernel(dim, get_point_list(*entries, dim, "entries"), label);
    }
    if (!decay->is_object()) invalid("decay", "expected an object");
    check_keys(*decay, {"coeff", "exponent", "half_line"}, "decay");
    const Complex coeff = get_complex(require(*decay, "coeff", "decay"), "decay.coeff");
    const double exponent = get_number(require(*decay, "exponent", "decay"), "decay.exponent");
    bool half_line = false;
    if (const json* h = optional_field(*decay, "half_line")) {
      if (!h->is_boolean()) invalid("decay.half_line", "expected true or false");
      half_line = h->get<bool>();
    }
    return diagonal_decay_kernel(dim, coeff, exponent, half_line, support, label);
  }
  if (family == "rank_one") {
    check_keys(p, {"family", "dim", "u", "v"}, "");
    return rank_one_kernel(dim, get_point_list(require(p, "u", ""), dim, "u"),
                           get_point_list(require(p, "v", ""), dim, "v"), label);
  }
  if (family == "banded") {
    check_keys(p, {"family", "dim", "support", "bands", "decay_exponent"}, "");
    double exponent = 0.0;
    if (const json* e = optional_field(p, "decay_exponent")) exponent = get_number(*e, "decay_exponent");
    return banded_kernel(dim, get_point_list(require(p, "bands", ""), dim, "bands"), exponent, support, label);
  }
  check_keys(p, {"family", "dim", "entries"}, "");
  const json& arr = get_array(require(p, "entries", ""), "entries");
  std::vector<TableEntry> entries;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    auto rec = get_point_record(arr[i], dim, 2, at("entries", i));
    entries.push_back({std::move(rec.first), std::move(rec.second), rec.value});
  }
  return table_kernel(dim, std::move(entries), label);
}

// ---------------------------------------------------------------------------
// toroidal_symbol

ToroidalSymbol build_symbol(const OperatorSpec& spec, long cutoff) {
  require_kind(spec, OperatorKind::toroidal_symbol);
  const json& p = spec.params;
  const std::string family = family_of(p, {"power_decay", "sharpness", "modulated", "custom_table"});
  const int dim = get_dim(p);
  int grid = default_x_grid(cutoff);
  if (const json* g = optional_field(p, "x_grid")) grid = static_cast<int>(get_int(*g, "x_grid", 1));
  const std::string label = display_label(spec, family);

  if (family == "power_decay") {
    check_keys(p, {"family", "dim", "x_grid", "coeff"}, "");
    if (!spec.order) invalid("order", "power_decay needs the symbol order");
    Complex coeff = 1.0;
    if (const json* c = optional_field(p, "coeff")) coeff = get_complex(*c, "coeff");
    return power_decay_symbol(dim, coeff, *spec.order, grid, label);
  }
  if (family == "sharpness") {
    check_keys(p, {"family", "dim", "x_grid"}, "");
    return sharpness_symbol(dim, grid, label);
  }
  if (family == "modulated") {
    check_keys(p, {"family", "dim", "x_grid", "modes"}, "");
    if (!spec.order) invalid("order", "modulated needs the symbol order");
    std::vector<SymbolMode> modes;
    for (auto& [theta, c] : get_point_list(require(p, "modes", ""), dim, "modes")) modes.push_back({theta, c});
    return modulated_symbol(dim, std::move(modes), *spec.order, grid, label);
  }
  check_keys(p, {"family", "dim", "x_grid", "entries"}, "");
  const json& arr = get_array(require(p, "entries", ""), "entries");
  std::vector<SymbolCoefficient> entries;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    auto rec = get_point_record(arr[i], dim, 2, at("entries", i));
    entries.push_back({std::move(rec.first), std::move(rec.second), rec.value});
  }
  return custom_table_symbol(dim, std::move(entries), spec.order, grid, label);
}

// ---------------------------------------------------------------------------
// block_symbol

BlockSymbol build_block_symbol(const OperatorSpec& spec) {
  require_kind(spec, OperatorKind::block_symbol);
  const json& p = spec.params;
  check_keys(p, {"blocks", "dims"}, "");
  const json& arr = get_array(require(p, "blocks", ""), "blocks");
  if (arr.empty()) invalid("blocks", "need at least one block");
  const json* dims = optional_field(p, "dims");
  if (dims) {
    get_array(*dims, "dims");
    if (dims->size() != arr.size()) {
      invalid("dims", "lists " + std::to_string(dims->size()) + " dimensions for " + std::to_string(arr.size()) +
                          " blocks");
    }
  }
  std::vector<CMatrix> blocks;
  for (std::size_t l = 0; l < arr.size(); ++l) {
    const std::string field = at("block", l);
    CMatrix b = get_matrix(arr[l], field);
    if (dims) {
      const long d = get_int((*dims)[l], at("dims", l), 1);
      if (static_cast<std::size_t>(d) != b.rows()) {
        invalid(field, "side " + std::to_string(b.rows()) + " does not match dims[" + std::to_string(l) +
                           "] = " + std::to_string(d));
      }
    }
    blocks.push_back(std::move(b));
  }
  return BlockSymbol(std::move(blocks), display_label(spec, "block_symbol"));
}

// ---------------------------------------------------------------------------
// spectral_model

SpectralModel build_spectral_model(const OperatorSpec& spec) {
  require_kind(spec, OperatorKind::spectral_model);
  const json& p = spec.params;
  check_keys(p, {"builtin", "levels", "table", "nu", "alpha"}, "");
  const json* builtin = optional_field(p, "builtin");
  const json* table = optional_field(p, "table");
  if ((builtin == nullptr) == (table == nullptr)) invalid("builtin", "give exactly one of builtin, table");

  SpectralModel sp;
  if (builtin) {
    if (!builtin->is_string()) invalid("builtin", "expected a string");
    const long levels = get_int(require(p, "levels", ""), "levels", 0);
    const auto name = builtin->get<std::string>();
    if (name == "circle") {
      sp = circle_spectrum(levels);
    } else if (name == "torus2") {
      sp = torus2_spectrum(levels);
    } else if (name == "sphere2") {
      sp = sphere2_spectrum(levels);
    } else {
      invalid("builtin", "unknown builtin '" + name + "' (expected circle, torus2 or sphere2)");
    }
    if (const json* nu = optional_field(p, "nu")) sp.nu = get_number(*nu, "nu");
  } else {
    if (optional_field(p, "levels")) invalid("levels", "levels applies to builtin spectra only");
    const json& rows = get_array(*table, "table");
    if (rows.empty()) invalid("table", "spectrum table is empty");
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const std::string field = at("table", j);
      if (!rows[j].is_array() || rows[j].size() != 2) invalid(field, "expected [eigenvalue, multiplicity]");
      sp.eigenvalues.push_back(get_number(rows[j][0], at(field, 0)));
      sp.multiplicities.push_back(get_int(rows[j][1], at(field, 1), 1));
    }
    sp.nu = get_number(require(p, "nu", ""), "nu");
  }
  sp.label = display_label(spec, sp.label);
  try {
    validate(sp);
  } catch (const ModelError& e) {
    invalid(table ? "table" : "nu", e.what());
  }
  return sp;
}

double spectral_alpha(const OperatorSpec& spec) {
  require_kind(spec, OperatorKind::spectral_model);
  const double alpha = get_number(require(spec.params, "alpha", ""), "alpha");
  if (!(alpha > 0.0)) invalid("alpha", "must be positive");
  return alpha;
}

// ---------------------------------------------------------------------------
// bundle_symbol

BundleSymbol build_bundle_symbol(const OperatorSpec& spec) {
  require_kind(spec, OperatorKind::bundle_symbol);
  const json& p = spec.params;
  check_keys(p, {"fiber_dim", "dual", "sigma"}, "");
  const int fiber = static_cast<int>(get_int(require(p, "fiber_dim", ""), "fiber_dim", 1));

  const json& dual_arr = get_array(require(p, "dual", ""), "dual");
  std::vector<DualBlock> blocks;
  std::set<std::string> ids;
  for (std::size_t x = 0; x < dual_arr.size(); ++x) {
    const std::string field = at("dual", x);
    const json& d = dual_arr[x];
    if (!d.is_array() || d.size() != 2 || !d[0].is_string()) invalid(field, "expected [id, dimension]");
    DualBlock b{d[0].get<std::string>(), static_cast<int>(get_int(d[1], at(field, 1), 1))};
    if (!ids.insert(b.id).second) invalid(field, "duplicate dual block id '" + b.id + "'");
    blocks.push_back(std::move(b));
  }
  DualObject dual(blocks);

  // (i, r, xi) -> matrix; absent entries are zero.
  std::map<std::tuple<int, int, std::size_t>, CMatrix> given;
  const json& sig = get_array(require(p, "sigma", ""), "sigma");
  for (std::size_t e = 0; e < sig.size(); ++e) {
    const std::string field = at("sigma", e);
    const json& rec = sig[e];
    if (!rec.is_object()) invalid(field, "expected an object with i, r, xi, matrix");
    check_keys(rec, {"i", "r", "xi", "matrix"}, field);
    const int i = static_cast<int>(get_int(require(rec, "i", field), join(field, "i"), 1));
    const int r = static_cast<int>(get_int(require(rec, "r", field), join(field, "r"), 1));
    if (i > fiber) invalid(join(field, "i"), "exceeds fiber_dim " + std::to_string(fiber));
    if (r > fiber) invalid(join(field, "r"), "exceeds fiber_dim " + std::to_string(fiber));
    const json& xi = require(rec, "xi", field);
    if (!xi.is_string()) invalid(join(field, "xi"), "expected a dual block id");
    std::size_t x = 0;
    try {
      x = dual.find(xi.get<std::string>());
    } catch (const LookupError&) {
      invalid(join(field, "xi"), "unknown dual block '" + xi.get<std::string>() + "'");
    }
    CMatrix m = get_matrix(require(rec, "matrix", field), join(field, "matrix"));
    const auto side = static_cast<std::size_t>(dual.block(x).dim);
    if (m.rows() != side) {
      invalid(join(field, "matrix"), "side " + std::to_string(m.rows()) + " does not match d_xi = " +
                                         std::to_string(side));
    }
    if (!given.emplace(std::make_tuple(i, r, x), std::move(m)).second) {
      invalid(field, "duplicate entry for (i, r, xi)");
    }
  }
  return BundleSymbol(
      fiber, dual,
      [&](int i, int r, std::size_t x) {
        auto it = given.find({i, r, x});
        if (it != given.end()) return it->second;
        const auto side = static_cast<std::size_t>(dual.block(x).dim);
        return CMatrix::zeros(side, side);
      },
      display_label(spec, "bundle_symbol"));
}

}  // namespace specdet::cli
