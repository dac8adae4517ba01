#include <doctest.h>

#include <json.hpp>

#include "specdet/spec_io.hpp"
#include "support/random.hpp"

using namespace specdet;
using namespace specdet::cli;
using specdet::testing::Rng;
using json = nlohmann::ordered_json;

namespace {

SpecError expect_error(const std::string& text) {
  try {
    (void)parse_spec_text(text);
  } catch (const SpecError& e) {
    return e;
  }
  FAIL("expected SpecError for " << text);
  return SpecError(SpecError::Category::validation, "");
}

json complex_of(Rng& rng) {
  const Complex z = rng.unit_disc();
  return json::array({z.real(), z.imag()});
}

json matrix_of(Rng& rng, int side) {
  json rows = json::array();
  for (int i = 0; i < side; ++i) {
    json row = json::array();
    for (int j = 0; j < side; ++j) row.push_back(complex_of(rng));
    rows.push_back(row);
  }
  return rows;
}

json point_entries(Rng& rng, int dim, int groups, int count) {
  json out = json::array();
  for (int e = 0; e < count; ++e) {
    json rec = json::array();
    for (int c = 0; c < dim * groups; ++c) rec.push_back(rng.integer(-3, 3));
    const Complex z = rng.unit_disc();
    rec.push_back(z.real());
    rec.push_back(z.imag());
    out.push_back(rec);
  }
  return out;
}

// A random valid spec document of the given kind.
json random_spec(Rng& rng, int kind) {
  json j;
  switch (kind) {
    case 0: {
      j["kind"] = "lattice_kernel";
      const int dim = static_cast<int>(rng.integer(1, 2));
      const int family = static_cast<int>(rng.integer(0, 4));
      if (family == 0) {
        j["family"] = "diagonal";
        j["dim"] = dim;
        j["entries"] = point_entries(rng, dim, 1, 3);
      } else if (family == 1) {
        j["family"] = "diagonal";
        j["dim"] = dim;
        j["decay"] = {{"coeff", complex_of(rng)}, {"exponent", rng.uniform(-4, -1)}, {"half_line", rng.coin()}};
        if (rng.coin()) j["support"] = rng.integer(0, 9);
      } else if (family == 2) {
        j["family"] = "rank_one";
        j["dim"] = dim;
        j["u"] = point_entries(rng, dim, 1, 2);
        j["v"] = point_entries(rng, dim, 1, 3);
      } else if (family == 3) {
        j["family"] = "banded";
        j["dim"] = dim;
        j["bands"] = point_entries(rng, dim, 1, 3);
        j["decay_exponent"] = rng.uniform(-3, 0);
      } else {
        j["family"] = "table";
        j["dim"] = dim;
        j["entries"] = point_entries(rng, dim, 2, 4);
      }
      break;
    }
    case 1: {
      j["kind"] = "toroidal_symbol";
      j["label"] = "symbol " + std::to_string(rng.integer(0, 99));
      const int family = static_cast<int>(rng.integer(0, 3));
      if (family == 0) {
        j["order"] = rng.uniform(-4, -1);
        j["family"] = "power_decay";
        j["dim"] = 1;
        j["coeff"] = complex_of(rng);
      } else if (family == 1) {
        j["family"] = "sharpness";
        j["dim"] = rng.integer(1, 2);
        j["x_grid"] = 64;
      } else if (family == 2) {
        j["order"] = -2;
        j["family"] = "modulated";
        j["dim"] = 1;
        j["modes"] = point_entries(rng, 1, 1, 3);
      } else {
        j["family"] = "custom_table";
        j["dim"] = 1;
        j["entries"] = point_entries(rng, 1, 2, 5);
      }
      break;
    }
    case 2: {
      j["kind"] = "block_symbol";
      json blocks = json::array(), dims = json::array();
      for (int l = 0; l < rng.integer(1, 4); ++l) {
        const int d = static_cast<int>(rng.integer(1, 3));
        blocks.push_back(matrix_of(rng, d));
        dims.push_back(d);
      }
      if (rng.coin()) j["dims"] = dims;
      j["blocks"] = blocks;
      break;
    }
    case 3: {
      j["kind"] = "spectral_model";
      if (rng.coin()) j["manifold_dim"] = rng.integer(1, 3);
      if (rng.coin()) {
        const char* names[] = {"circle", "torus2", "sphere2"};
        j["builtin"] = names[rng.integer(0, 2)];
        j["levels"] = rng.integer(0, 50);
      } else {
        json table = json::array();
        for (int r = 0; r < rng.integer(1, 5); ++r) table.push_back(json::array({rng.uniform(0, 30), rng.integer(1, 4)}));
        j["table"] = table;
        j["nu"] = rng.uniform(0.5, 4);
      }
      j["alpha"] = rng.uniform(0.5, 4);
      break;
    }
    default: {
      j["kind"] = "bundle_symbol";
      const int fiber = static_cast<int>(rng.integer(1, 3));
      j["fiber_dim"] = fiber;
      j["dual"] = json::array({json::array({"a", 1}), json::array({"b", 2})});
      json sigma = json::array();
      for (int i = 1; i <= fiber; ++i)
        for (int r = 1; r <= fiber; ++r)
          if (rng.coin()) {
            const bool small = rng.coin();
            sigma.push_back({{"i", i}, {"r", r}, {"xi", small ? "a" : "b"}, {"matrix", matrix_of(rng, small ? 1 : 2)}});
          }
      j["sigma"] = sigma;
      break;
    }
  }
  return j;
}

}  // namespace

TEST_CASE("minimal diagonal kernel spec") {
  const OperatorSpec spec =
      parse_spec_text(R"({"kind":"lattice_kernel","family":"diagonal","entries":[[0,1.0,0.0]],"dim":1})");
  CHECK(spec.kind == OperatorKind::lattice_kernel);
  const LatticeKernel k = build_kernel(spec);
  CHECK(k(Point{0}, Point{0}) == Complex(1.0, 0.0));
  CHECK(k(Point{1}, Point{1}) == Complex(0.0, 0.0));
}

TEST_CASE("validation errors name the field") {
  const std::string blocks = R"({"kind":"block_symbol","dims":[1,1,2],"blocks":[[[[1,0]]],[[[1,0]]],[[[1,0]]]]})";
  SpecError e = expect_error(blocks);
  CHECK(e.category() == SpecError::Category::validation);
  CHECK(e.field() == "block[2]");

  CHECK(expect_error(R"({"kind":"lattice_kernel","family":"banded","dim":1,"bands":[],"width":2})").field() ==
        "width");
  CHECK(expect_error(R"({"kind":"lattice_kernel","family":"banded","bands":[]})").field() == "dim");
  CHECK(expect_error(R"({"kind":"lattice_kernel","family":"banded","dim":"one","bands":[]})").field() == "dim");
  CHECK(expect_error(R"({"kind":"lattice_kernel","family":"spiral","dim":1})").field() == "family");
  CHECK(expect_error(R"({"kind":"lattice_kernel","family":"table","dim":1,"entries":[[0,1,2.0]]})").field() ==
        "entries[0]");
  CHECK(expect_error(R"({"kind":"hilbert_space"})").field() == "kind");
  CHECK(expect_error(R"([1,2,3])").field() == "<root>");
  CHECK(expect_error(R"({"kind":"block_symbol","blocks":[[[[1,0],[0,0]]]]})").field() == "block[0]");
  CHECK(expect_error(R"({"kind":"block_symbol","blocks":[[[[1,0],[0,0]],[[1,0]]]]})").field() == "block[0][1]");
  CHECK(expect_error(R"({"kind":"toroidal_symbol","family":"power_decay","dim":1})").field() == "order");
  CHECK(expect_error(R"({"kind":"spectral_model","builtin":"circle","levels":4,"alpha":-1})").field() == "alpha");
  CHECK(expect_error(R"({"kind":"spectral_model","table":[[-1,1]],"nu":2,"alpha":1})").field() == "table");
  CHECK(expect_error(R"({"kind":"spectral_model","builtin":"klein","levels":4,"alpha":1})").field() == "builtin");
  CHECK(expect_error(R"({"kind":"bundle_symbol","fiber_dim":1,"dual":[["a",2]],
      "sigma":[{"i":1,"r":1,"xi":"a","matrix":[[[1,0]]]}]})")
            .field() == "sigma[0].matrix");
  CHECK(expect_error(R"({"kind":"bundle_symbol","fiber_dim":1,"dual":[["a",1]],
      "sigma":[{"i":2,"r":1,"xi":"a","matrix":[[[1,0]]]}]})")
            .field() == "sigma[0].i");
  CHECK(expect_error(R"({"kind":"bundle_symbol","fiber_dim":1,"dual":[["a",1],["a",1]],"sigma":[]})").field() ==
        "dual[1]");
  try {
    parse_spec_text(R"({"kind":"lattice_kernel","family":"diagonal","dim":1,"entries":[[0,1e400,0]]})");
    FAIL("overflowing literal accepted");
  } catch (const SpecError& e) {
    CHECK(e.category() == SpecError::Category::syntax);
  }
}

TEST_CASE("syntax errors carry line and column") {
  const SpecError e = expect_error("{\n  \"kind\": \"lattice_kernel\",\n  \"dim\": 1,,\n}");
  CHECK(e.category() == SpecError::Category::syntax);
  CHECK(e.line() == 3);
  CHECK(e.column() == 12);
  CHECK(std::string(e.what()).find("line 3, column 12") == 0);
}

TEST_CASE("metadata is lifted out of the parameters") {
  const OperatorSpec spec = parse_spec_text(
      R"({"kind":"toroidal_symbol","label":"s","order":-2,"family":"power_decay","dim":1,"coeff":[2,0]})");
  CHECK(spec.label == "s");
  CHECK(spec.order == -2.0);
  CHECK_FALSE(spec.params.contains("order"));
  const ToroidalSymbol s = build_symbol(spec, 4);
  CHECK(s.x_grid() == default_x_grid(4));
  const double x[1] = {0.3};
  const long k[1] = {1};
  CHECK(s(x, k) == Complex(1.0, 0.0));
  CHECK_THROWS_AS(build_kernel(spec), SpecError);
}

TEST_CASE("emit then parse reproduces generated specs") {
  Rng rng(81);
  for (int t = 0; t < 300; ++t) {
    const json doc = random_spec(rng, t % 5);
    const OperatorSpec spec = parse_spec_text(doc.dump());
    const std::string emitted = emit_spec(spec);
    const OperatorSpec again = parse_spec_text(emitted);
    CHECK(again == spec);
    CHECK(emit_spec(again) == emitted);
  }
}

TEST_CASE("kind names") {
  for (auto k : {OperatorKind::lattice_kernel, OperatorKind::toroidal_symbol, OperatorKind::block_symbol,
                 OperatorKind::spectral_model, OperatorKind::bundle_symbol}) {
    CHECK(kind_from_string(to_string(k)) == k);
  }
  CHECK_FALSE(kind_from_string("banach").has_value());
}
