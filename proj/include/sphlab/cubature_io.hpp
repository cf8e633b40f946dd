#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sphlab/cubature.hpp"

namespace sphlab {

/// Raised for documents that do not match the cubature schema.
class CubatureFormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// {"degree", "nodes", "weights", "residual", "generator", "seed"}; an
/// optional "manifest" object is carried through untouched.
struct CubatureDocument {
  CubatureFormula formula;
  double residual = 0.0;
  std::string generator = "known";  // "search" or "known"
  std::optional<std::uint64_t> seed;
  nlohmann::json manifest;  // null when absent
};

nlohmann::json to_json(const CubatureDocument& doc);
CubatureDocument cubature_from_json(const nlohmann::json& j);

/// Parse text; malformed JSON or schema violations raise CubatureFormatError.
CubatureDocument parse_cubature(const std::string& text);
CubatureDocument read_cubature_file(const std::string& path);

}  // namespace sphlab
