#include "sphlab/cubature_io.hpp"

#include <fstream>
#include <sstream>

namespace sphlab {

nlohmann::json to_json(const CubatureDocument& doc) {
  nlohmann::json j;
  j["degree"] = doc.formula.target_degree();
  auto nodes = nlohmann::json::array();
  for (const auto& p : doc.formula.nodes()) nodes.push_back({p.x(), p.y(), p.z()});
  j["nodes"] = std::move(nodes);
  j["weights"] = doc.formula.weights();
  j["residual"] = doc.residual;
  j["generator"] = doc.generator;
  j["seed"] = doc.seed ? nlohmann::json(*doc.seed) : nlohmann::json(nullptr);
  if (!doc.manifest.is_null()) j["manifest"] = doc.manifest;
  return j;
}

CubatureDocument cubature_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw CubatureFormatError("cubature document must be a JSON object");
    const int degree = j.at("degree").get<int>();
    std::vector<UnitVec3> nodes;
    for (const auto& n : j.at("nodes")) {
      if (!n.is_array() || n.size() != 3) throw CubatureFormatError("node must be [x, y, z]");
      const double x = n[0].get<double>(), y = n[1].get<double>(), z = n[2].get<double>();
      if (std::abs(x * x + y * y + z * z - 1.0) > 1e-12) {
        throw CubatureFormatError("node is not on the unit sphere");
      }
      nodes.push_back(UnitVec3::from_cartesian(x, y, z));
    }
    auto weights = j.at("weights").get<std::vector<double>>();
    CubatureDocument doc{CubatureFormula(std::move(nodes), std::move(weights), degree), 0.0,
                         "known", std::nullopt, nullptr};
    if (j.contains("residual")) doc.residual = j["residual"].get<double>();
    if (j.contains("generator")) doc.generator = j["generator"].get<std::string>();
    if (j.contains("seed") && !j["seed"].is_null()) doc.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("manifest")) doc.manifest = j["manifest"];
    return doc;
  } catch (const CubatureFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw CubatureFormatError(std::string("invalid cubature document: ") + e.what());
  }
}

CubatureDocument parse_cubature(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CubatureFormatError(std::string("malformed JSON: ") + e.what());
  }
  return cubature_from_json(j);
}

CubatureDocument read_cubature_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CubatureFormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_cubature(ss.str());
}

}  // namespace sphlab
