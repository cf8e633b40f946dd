#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sphlab/circle_lm.hpp"
#include "sphlab/cubature.hpp"
#include "sphlab/mto_sharpness.hpp"

namespace sphlab::cli {

/// A rectangular result; cells are JSON scalars (numbers, booleans, strings).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
};

/// 17 significant digits, so every double round-trips.
std::string format_double(double x);

/// One header line, then one line per row.
std::string to_csv(const Table& t);
/// {"columns": [...], "rows": [[...], ...]}.
nlohmann::json to_json(const Table& t);

Table residual_table(const CubatureFormula& f, int m);
Table sharpness_table(const SweepResult& s);
Table estimate_table(const NmEstimate& e);
Table xi_sweep_table(const std::vector<circle::XiSweepRow>& rows);

/// [[k, re, im], ...] for k = -K..K.
nlohmann::json series_json(const circle::FourierSeries& f);
nlohmann::json complex_json(circle::cplx z);

/// "0.7", "0.7+0.2i", "-0.1-0.3i", "0.4i". Throws std::invalid_argument.
circle::cplx parse_complex(const std::string& text);

}  // namespace sphlab::cli
