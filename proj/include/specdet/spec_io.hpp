#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "specdet/bundle.hpp"
#include "specdet/errors.hpp"
#include "specdet/invariant.hpp"
#include "specdet/lattice.hpp"
#include "specdet/toroidal.hpp"

namespace specdet::cli {

enum class OperatorKind { lattice_kernel, toroidal_symbol, block_symbol, spectral_model, bundle_symbol };

const char* to_string(OperatorKind k) noexcept;
std::optional<OperatorKind> kind_from_string(std::string_view s) noexcept;

/// A validated operator description read from a spec file.
///
/// params holds the kind-specific fields exactly as written in the file
/// (family, dim, entries, blocks, ...); label, order and manifold_dim are
/// lifted out as metadata.
struct OperatorSpec {
  OperatorKind kind = OperatorKind::lattice_kernel;
  std::string label;
  std::optional<double> order;
  std::optional<int> manifold_dim;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();

  friend bool operator==(const OperatorSpec&, const OperatorSpec&) = default;
};

/// Malformed or invalid spec file. For syntax errors line/column locate the
/// problem (1-based); for validation errors field names the offending field,
/// e.g. "block[2]" or "sigma[0].matrix".
class SpecError : public Error {
 public:
  enum class Category { syntax, validation };

  SpecError(Category category, std::string message, std::string field = {}, int line = 0, int column = 0)
      : Error(std::move(message)), category_(category), field_(std::move(field)), line_(line), column_(column) {}

  Category category() const noexcept { return category_; }
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  Category category_;
  std::string field_;
  int line_;
  int column_;
};

OperatorSpec parse_spec(const std::filesystem::path& path);
OperatorSpec parse_spec_text(std::string_view text);

/// Serialises a spec back to the file format (pretty-printed JSON).
std::string emit_spec(const OperatorSpec& spec);

// Construction of the library objects a spec describes. Each throws SpecError
// if the OperatorSpec is of a different kind.

LatticeKernel build_kernel(const OperatorSpec& spec);
/// The sampling grid defaults to default_x_grid(cutoff) unless x_grid is set.
ToroidalSymbol build_symbol(const OperatorSpec& spec, long cutoff);
BlockSymbol build_block_symbol(const OperatorSpec& spec);
SpectralModel build_spectral_model(const OperatorSpec& spec);
double spectral_alpha(const OperatorSpec& spec);
BundleSymbol build_bundle_symbol(const OperatorSpec& spec);

}  // namespace specdet::cli
