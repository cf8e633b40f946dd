#include "reports.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace sphlab::cli {

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

namespace {

std::string cell(const nlohmann::json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

double parse_real(const std::string& s, const std::string& whole) {
  if (s.empty() || s == "+" || s == "-") {
    if (s == "-") return -1.0;
    return 1.0;  // bare "i" or "+i"
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw std::invalid_argument("not a complex number: '" + whole + "'");
  return v;
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + t.columns[c];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + cell(row[c]);
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const Table& t) {
  return {{"columns", t.columns}, {"rows", t.rows}};
}

Table residual_table(const CubatureFormula& f, int m) {
  Table t{{"k", "j", "residual"}, {}};
  const auto r = moment_residuals(f, m);
  for (std::size_t q = 0; q < r.size(); ++q) {
    const auto idx = SHIndex::from_flat(q + 1);
    t.rows.push_back({idx.degree, idx.order, r[q]});
  }
  return t;
}

Table sharpness_table(const SweepResult& s) {
  Table t{{"eps", "delta", "N", "m", "log_mass", "energy", "mean_u", "ratio",
           "max_moment_residual"},
          {}};
  for (const auto& r : s.rows) {
    t.rows.push_back({r.eps, r.delta, r.num_nodes, r.degree, r.report.log_mass, r.report.energy,
                      r.report.mean, r.report.ratio, r.report.max_moment_residual});
  }
  return t;
}

Table estimate_table(const NmEstimate& e) {
  Table t{{"m", "N", "lower_bound", "best_residual", "converged", "open"}, {}};
  for (const auto& r : e.rows) {
    t.rows.push_back({e.degree, r.num_nodes, e.lower_bound, r.best_residual, r.converged, e.open});
  }
  return t;
}

Table xi_sweep_table(const std::vector<circle::XiSweepRow>& rows) {
  Table t{{"xi_re", "xi_im", "m", "lhs", "rhs", "gap", "max_moment"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({r.xi.real(), r.xi.imag(), r.m, r.report.lhs, r.report.rhs, r.report.gap,
                      r.report.max_moment});
  }
  return t;
}

nlohmann::json series_json(const circle::FourierSeries& f) {
  auto j = nlohmann::json::array();
  for (int k = -f.max_index(); k <= f.max_index(); ++k) {
    j.push_back({k, f[k].real(), f[k].imag()});
  }
  return j;
}

nlohmann::json complex_json(circle::cplx z) { return {z.real(), z.imag()}; }

circle::cplx parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  }
  if (s.empty()) throw std::invalid_argument("empty complex number");
  if (s.back() != 'i') return {parse_real(s, text), 0.0};
  s.pop_back();
  // Split at the last sign that is not the leading one or part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t p = s.size(); p-- > 1;) {
    if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, parse_real(s, text)};
  return {parse_real(s.substr(0, split), text), parse_real(s.substr(split), text)};
}

}  // namespace sphlab::cli
