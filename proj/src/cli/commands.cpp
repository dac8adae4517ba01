#include "specdet/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>

#include "specdet/oracle.hpp"
#include "specdet/spec_io.hpp"

namespace specdet::cli {

using json = nlohmann::ordered_json;

namespace {

struct Options {
  std::string command;
  std::string input;
  std::string lambda_text = "0.1,0";
  Complex lambda{0.1, 0.0};
  int order = 30;
  long cutoff = 8;
  double tol = 1e-10;
  std::string mode = "both";
  std::string output = "text";
};

// Everything a command needs from one operator, independent of its kind.
struct Problem {
  OperatorKind kind = OperatorKind::lattice_kernel;
  std::string label;
  bool uses_cutoff = false;
  std::function<DetResult(Complex, int, double)> series_det;
  std::function<Complex(Complex)> oracle_det;
  std::function<Complex()> oracle_trace;
  std::function<TracePowerSource()> source;
  std::function<NormProfile(const std::vector<long>&)> norm_profile;
};

Problem make_problem(const OperatorSpec& spec, long cutoff) {
  Problem p;
  p.kind = spec.kind;
  p.label = spec.label.empty() ? to_string(spec.kind) : spec.label;
  switch (spec.kind) {
    case OperatorKind::lattice_kernel: {
      auto k = std::make_shared<LatticeKernel>(build_kernel(spec));
      p.uses_cutoff = true;
      p.series_det = [k, cutoff](Complex l, int m, double t) { return lattice_determinant(*k, l, m, cutoff, t); };
      p.oracle_det = [k, cutoff](Complex l) {
        return oracle::direct_determinant(oracle::assemble_truncation(*k, cutoff), l);
      };
      p.oracle_trace = [k, cutoff] { return trace(oracle::assemble_truncation(*k, cutoff)); };
      p.source = [k, cutoff] { return lattice_trace_source(*k, cutoff); };
      p.norm_profile = [k](const std::vector<long>& rs) { return kernel_norm_profile(*k, rs); };
      break;
    }
    case OperatorKind::toroidal_symbol: {
      auto s = std::make_shared<ToroidalSymbol>(build_symbol(spec, cutoff));
      p.uses_cutoff = true;
      p.series_det = [s, cutoff](Complex l, int m, double t) { return toroidal_determinant(*s, l, m, cutoff, t); };
      p.oracle_det = [s, cutoff](Complex l) {
        return oracle::direct_determinant(oracle::assemble_symbol_truncation(*s, cutoff), l);
      };
      p.oracle_trace = [s, cutoff] { return trace(oracle::assemble_symbol_truncation(*s, cutoff)); };
      p.source = [s, cutoff] { return lattice_trace_source(toroidal_matrix(*s, cutoff), cutoff); };
      p.norm_profile = [s](const std::vector<long>& rs) { return norm_growth_profile(*s, rs); };
      break;
    }
    case OperatorKind::block_symbol: {
      auto b = std::make_shared<BlockSymbol>(build_block_symbol(spec));
      p.series_det = [b](Complex l, int m, double t) { return invariant_determinant(*b, l, m, t); };
      p.oracle_det = [b](Complex l) { return oracle::direct_determinant(oracle::assemble_block_diagonal(*b), l); };
      p.oracle_trace = [b] { return trace(oracle::assemble_block_diagonal(*b)); };
      p.source = [b] { return block_trace_source(*b); };
      break;
    }
    case OperatorKind::spectral_model: {
      auto sp = std::make_shared<SpectralModel>(build_spectral_model(spec));
      const double alpha = spectral_alpha(spec);
      const auto n = spec.manifold_dim;
      p.series_det = [sp, alpha, n](Complex l, int m, double t) {
        return manifold_determinant(*sp, alpha, l, m, t, n);
      };
      p.oracle_det = [sp, alpha](Complex l) { return oracle::spectral_direct_product(*sp, alpha, l); };
      p.oracle_trace = [sp, alpha] { return Complex(oracle::spectral_direct_trace(*sp, alpha), 0.0); };
      p.source = [sp, alpha] { return manifold_trace_source(*sp, alpha); };
      break;
    }
    case OperatorKind::bundle_symbol: {
      auto a = std::make_shared<BundleSymbol>(build_bundle_symbol(spec));
      p.series_det = [a](Complex l, int m, double t) { return bundle_determinant(*a, l, m, t); };
      p.oracle_det = [a](Complex l) { return oracle::bundle_direct_determinant(*a, l); };
      p.oracle_trace = [a] {
        Complex acc = 0.0;
        for (std::size_t x = 0; x < a->dual().size(); ++x) {
          acc += static_cast<double>(a->dual().block(x).dim) * trace(oracle::bundle_block_matrix(*a, x));
        }
        return acc;
      };
      p.source = [a] { return bundle_trace_source(*a); };
      break;
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// formatting

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  const double r = round_significant(v);
  return r == 0.0 ? 0.0 : r;
}

json complex_json(Complex z) { return json::array({number(z.real()), number(z.imag())}); }

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string fmt(Complex z) {
  const double im = z.imag() == 0.0 ? 0.0 : z.imag();
  return fmt(z.real()) + (std::signbit(im) ? " - " : " + ") + fmt(std::abs(im)) + "i";
}

struct Deviation {
  double absolute;
  double relative;
};

Deviation deviation(Complex series, Complex oracle) {
  const double abs_dev = std::abs(series - oracle);
  const double scale = std::abs(oracle);
  return {abs_dev, scale > 0.0 ? abs_dev / scale : abs_dev};
}

json header(const Options& o, const Problem& p) {
  json j;
  j["command"] = o.command;
  j["kind"] = to_string(p.kind);
  j["label"] = p.label;
  return j;
}

void print_text_header(std::ostream& out, const Options& o, const Problem& p) {
  out << o.command << ": " << to_string(p.kind) << " '" << p.label << "'\n";
}

void print_warnings(std::ostream& out, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) out << "warning: " << w << "\n";
}

json warnings_json(const std::vector<std::string>& warnings) {
  json arr = json::array();
  for (const auto& w : warnings) arr.push_back(w);
  return arr;
}

// ---------------------------------------------------------------------------
// commands

int cmd_det(const Options& o, const Problem& p, std::ostream& out, bool compare) {
  const bool want_series = compare || o.mode != "oracle";
  const bool want_oracle = compare || o.mode != "series";
  std::optional<DetResult> series;
  std::optional<Complex> oracle_value;
  if (want_series) series = p.series_det(o.lambda, o.order, o.tol);
  if (want_oracle) oracle_value = p.oracle_det(o.lambda);
  const std::vector<std::string> warnings = series ? series->warnings : std::vector<std::string>{};

  if (o.output == "json") {
    json j = header(o, p);
    j["lambda"] = complex_json(o.lambda);
    j["mode"] = compare ? std::string("both") : o.mode;
    j["order"] = o.order;
    if (p.uses_cutoff) j["cutoff"] = o.cutoff;
    j["tol"] = number(o.tol);
    if (series) {
      json s;
      s["value"] = complex_json(series->value);
      if (!compare) {
        json terms = json::array();
        for (const auto& t : series->terms) terms.push_back(complex_json(t));
        s["terms"] = std::move(terms);
        s["order_used"] = series->order_used;
        s["cutoff_used"] = series->cutoff_used;
        s["tail_estimate"] = number(series->tail_estimate);
      }
      s["converged"] = series->converged;
      j["series"] = std::move(s);
    }
    if (oracle_value) j["oracle"] = json{{"value", complex_json(*oracle_value)}};
    if (series && oracle_value) {
      const auto d = deviation(series->value, *oracle_value);
      j["deviation"] = json{{"absolute", number(d.absolute)}, {"relative", number(d.relative)}};
    }
    j["warnings"] = warnings_json(warnings);
    out << j.dump(2) << "\n";
  } else {
    print_text_header(out, o, p);
    out << "lambda            " << fmt(o.lambda) << "\n";
    if (series) {
      out << "series value      " << fmt(series->value) << "\n";
      if (!compare) {
        out << "  terms used      " << series->order_used << "\n";
        out << "  cutoff used     " << series->cutoff_used << "\n";
        out << "  tail estimate   " << fmt(series->tail_estimate) << "\n";
      }
      out << "  converged       " << (series->converged ? "yes" : "no") << "\n";
    }
    if (oracle_value) out << "oracle value      " << fmt(*oracle_value) << "\n";
    if (series && oracle_value) {
      const auto d = deviation(series->value, *oracle_value);
      out << "deviation         absolute " << fmt(d.absolute) << ", relative " << fmt(d.relative) << "\n";
    }
    print_warnings(out, warnings);
  }
  if (!compare && o.mode == "series" && !series->converged) return exit_not_converged;
  return exit_ok;
}

int cmd_trace(const Options& o, const Problem& p, std::ostream& out) {
  std::optional<Complex> series;
  std::optional<Complex> oracle_value;
  if (o.mode != "oracle") series = p.source().trace_power(1);
  if (o.mode != "series") oracle_value = p.oracle_trace();
  if (o.output == "json") {
    json j = header(o, p);
    j["mode"] = o.mode;
    if (p.uses_cutoff) j["cutoff"] = o.cutoff;
    if (series) j["series"] = json{{"value", complex_json(*series)}};
    if (oracle_value) j["oracle"] = json{{"value", complex_json(*oracle_value)}};
    if (series && oracle_value) {
      const auto d = deviation(*series, *oracle_value);
      j["deviation"] = json{{"absolute", number(d.absolute)}, {"relative", number(d.relative)}};
    }
    out << j.dump(2) << "\n";
  } else {
    print_text_header(out, o, p);
    if (series) out << "series trace      " << fmt(*series) << "\n";
    if (oracle_value) out << "oracle trace      " << fmt(*oracle_value) << "\n";
    if (series && oracle_value) {
      const auto d = deviation(*series, *oracle_value);
      out << "deviation         absolute " << fmt(d.absolute) << ", relative " << fmt(d.relative) << "\n";
    }
  }
  return exit_ok;
}

int cmd_radius(const Options& o, const Problem& p, std::ostream& out) {
  const double radius = radius_estimate(p.source(), o.order);
  if (o.output == "json") {
    json j = header(o, p);
    j["order"] = o.order;
    if (p.uses_cutoff) j["cutoff"] = o.cutoff;
    j["radius"] = number(radius);
    j["lambda_inside"] = std::abs(o.lambda) < radius;
    out << j.dump(2) << "\n";
  } else {
    print_text_header(out, o, p);
    out << "radius estimate   " << fmt(radius) << "\n";
    out << "lambda inside     " << (std::abs(o.lambda) < radius ? "yes" : "no") << "\n";
  }
  return exit_ok;
}

int cmd_norm_profile(const Options& o, const Problem& p, std::ostream& out) {
  if (!p.norm_profile) {
    throw SpecError(SpecError::Category::validation,
                    std::string("norm-profile needs a lattice_kernel or toroidal_symbol, got ") + to_string(p.kind),
                    "kind");
  }
  const NormProfile prof = p.norm_profile(profile_cutoffs(o.cutoff));
  if (o.output == "json") {
    json j = header(o, p);
    json pts = json::array();
    for (const auto& [r, v] : prof.points) pts.push_back(json::array({r, number(v)}));
    json inc = json::array();
    for (double d : prof.increments) inc.push_back(number(d));
    j["points"] = std::move(pts);
    j["increments"] = std::move(inc);
    j["verdict"] = to_string(prof.verdict);
    out << j.dump(2) << "\n";
  } else {
    print_text_header(out, o, p);
    for (std::size_t i = 0; i < prof.points.size(); ++i) {
      out << "R = " << prof.points[i].first << "  norm " << fmt(prof.points[i].second);
      if (i > 0) out << "  increment " << fmt(prof.increments[i - 1]);
      out << "\n";
    }
    out << "verdict           " << to_string(prof.verdict) << "\n";
  }
  return exit_ok;
}

Complex parse_lambda(const std::string& text) {
  const auto comma = text.find(',');
  auto parse = [&](const std::string& part) {
    char* end = nullptr;
    const double v = std::strtod(part.c_str(), &end);
    if (part.empty() || end != part.c_str() + part.size() || !std::isfinite(v)) {
      throw ParameterError("--lambda expects RE,IM with finite numbers, got '" + text + "'");
    }
    return v;
  };
  if (comma == std::string::npos) return {parse(text), 0.0};
  return {parse(text.substr(0, comma)), parse(text.substr(comma + 1))};
}

// ---------------------------------------------------------------------------
// error reporting

struct Failure {
  const char* category;
  std::string message;
  std::string field;
  int code;
};

void report_failure(const Failure& f, bool json_errors, std::ostream& err) {
  if (json_errors) {
    json j;
    j["error"] = f.category;
    j["message"] = f.message;
    j["field"] = f.field.empty() ? json(nullptr) : json(f.field);
    j["exit_code"] = f.code;
    err << j.dump() << "\n";
  } else {
    err << "specdet: " << f.category << ": " << f.message << "\n";
  }
}

bool wants_json_errors(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--output=json") return true;
    if (args[i] == "--output" && i + 1 < args.size() && args[i + 1] == "json") return true;
  }
  return false;
}

}  // namespace

double round_significant(double v, int digits) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

std::vector<long> profile_cutoffs(long cutoff) {
  std::vector<long> rs;
  for (long r = cutoff; r >= 1 && rs.size() < 5; r /= 2) rs.push_back(r);
  std::reverse(rs.begin(), rs.end());
  return rs;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const bool json_errors = wants_json_errors(args);
  Options o;
  CLI::App app{"Fredholm determinants and traces of operators given by kernels or symbols", "specdet"};
  app.require_subcommand(1);
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"det", "Det(I + lambda T) by the trace-power series and/or the truncated matrix"},
      {"trace", "Tr(T) by the trace source and/or the truncated matrix"},
      {"norm-profile", "growth of the l1 matrix norm over doubling cutoffs"},
      {"radius", "root-test estimate of the series radius in lambda"},
      {"compare", "series value against the oracle value with deviations"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--input", o.input, "operator spec file (JSON)")->required();
    sub->add_option("--lambda", o.lambda_text, "spectral parameter RE,IM")->capture_default_str();
    sub->add_option("--order", o.order, "maximal series order M")->capture_default_str();
    sub->add_option("--cutoff", o.cutoff, "box radius R")->capture_default_str();
    sub->add_option("--tol", o.tol, "early-stop tolerance")->capture_default_str();
    sub->add_option("--mode", o.mode, "series, oracle or both")
        ->check(CLI::IsMember({"series", "oracle", "both"}))
        ->capture_default_str();
    sub->add_option("--output", o.output, "text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    sub->callback([&o, name = std::string(name)] { o.command = name; });
  }

  std::vector<std::string> words{"specdet"};
  words.insert(words.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& w : words) argv.push_back(w.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return exit_ok;
    }
    report_failure({"usage_error", e.what(), {}, exit_invalid}, json_errors, err);
    return exit_invalid;
  }

  try {
    o.lambda = parse_lambda(o.lambda_text);
    if (o.order < 1) throw ParameterError("--order must be >= 1");
    if (o.cutoff < 1) throw ParameterError("--cutoff must be >= 1");
    if (!(o.tol > 0.0)) throw ParameterError("--tol must be positive");
    const OperatorSpec spec = parse_spec(o.input);
    const Problem problem = make_problem(spec, o.cutoff);
    if (o.command == "det") {
      const int rc = cmd_det(o, problem, out, false);
      if (rc == exit_not_converged) {
        report_failure({"not_converged", "series did not reach the tolerance within the requested order", {}, rc},
                       json_errors, err);
      }
      return rc;
    }
    if (o.command == "compare") return cmd_det(o, problem, out, true);
    if (o.command == "trace") return cmd_trace(o, problem, out);
    if (o.command == "radius") return cmd_radius(o, problem, out);
    return cmd_norm_profile(o, problem, out);
  } catch (const SpecError& e) {
    const char* category = e.category() == SpecError::Category::syntax ? "parse_error" : "validation_error";
    report_failure({category, e.what(), e.field(), exit_invalid}, json_errors, err);
    return exit_invalid;
  } catch (const FeasibilityError& e) {
    report_failure({"feasibility_error", e.what(), {}, exit_infeasible}, json_errors, err);
    return exit_infeasible;
  } catch (const Error& e) {
    report_failure({"invalid_input", e.what(), {}, exit_invalid}, json_errors, err);
    return exit_invalid;
  } catch (const std::exception& e) {
    report_failure({"internal_error", e.what(), {}, exit_failure}, json_errors, err);
    return exit_failure;
  }
}

}  // namespace specdet::cli
