#include "sphlab/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>

#include "manifest.hpp"
#include "reports.hpp"
#include "sphlab/circle_lm.hpp"
#include "sphlab/cubature.hpp"
#include "sphlab/cubature_io.hpp"
#include "sphlab/mto_sharpness.hpp"

namespace sphlab::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::uint64_t seed = 0;
  std::optional<double> tol;
  int grid_degree = 64;
};

// Writes results and their manifests. A single writer at the end of the run.
class Emitter {
public:
  Emitter(std::vector<std::string> argv, std::uint64_t seed, std::ostream& out)
      : argv_(std::move(argv)), seed_(seed), out_(out), start_(Clock::now()) {}

  void json_result(json payload, const json& config, const json& summary,
                   const std::string& path) {
    payload["manifest"] = manifest(payload.dump(2), config, summary);
    write(payload.dump(2) + "\n", path);
  }

  void table_result(const Table& t, const std::string& format, const json& config,
                    const json& summary, const std::string& path) {
    if (format == "json") {
      json payload = to_json(t);
      payload["summary"] = summary;
      json_result(std::move(payload), config, summary, path);
      return;
    }
    const std::string text = to_csv(t);
    write(text, path);
    if (!path.empty()) write(manifest(text, config, summary).dump(2) + "\n", path + ".manifest.json");
  }

private:
  json manifest(const std::string& payload, const json& config, const json& summary) const {
    RunManifest m;
    m.command_line = argv_;
    m.config = config;
    if (!m.config.contains("seed")) m.config["seed"] = seed_;
    m.summary = summary;
    m.result_sha256 = sha256_hex(payload);
    m.wall_time_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return to_json(m);
  }

  void write(const std::string& text, const std::string& path) {
    if (path.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw IoError("failed writing '" + path + "'");
  }

  std::vector<std::string> argv_;
  std::uint64_t seed_;
  std::ostream& out_;
  Clock::time_point start_;
};

CubatureFormula load_formula(const std::string& file, const std::string& known) {
  if (!file.empty() && !known.empty()) {
    throw std::invalid_argument("give either --cubature or --known, not both");
  }
  if (!known.empty()) return known_formula(known);
  if (file.empty()) throw std::invalid_argument("one of --cubature or --known is required");
  return read_cubature_file(file).formula;
}

json search_config_json(const SearchConfig& c) {
  return {{"multistarts", c.multistarts}, {"seed", c.seed}, {"max_iter", c.max_iter},
          {"tol", c.tol}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cubature, Moser-Trudinger sharpness and Lebedev-Milin experiments", "sphlab"};
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config", "", "Read options from a flat key = value file");
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  app.add_option("--seed", common.seed, "Base RNG seed")->capture_default_str();
  app.add_option("--tol", common.tol, "Tolerance (meaning depends on the command)");
  app.add_option("--grid-degree", common.grid_degree, "Band limit of the global sphere grid")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();

  std::string out_path, format = "csv";

  // cubature
  auto* cub = app.add_subcommand("cubature", "Cubature formulas on the sphere");
  cub->require_subcommand(1);

  std::string verify_file;
  int verify_degree = 0;
  auto* verify = cub->add_subcommand("verify", "Check the degree of precision of a JSON formula");
  verify->add_option("file", verify_file, "Cubature JSON")->required();
  verify->add_option("--degree,-m", verify_degree, "Degree to verify (default: the file's)");

  int search_nodes = 0, search_degree = 0;
  SearchConfig search_cfg;
  auto* srch = cub->add_subcommand("search", "Multistart search for an N-node degree-m formula");
  srch->add_option("--nodes,-N", search_nodes, "Number of nodes")->required()->check(CLI::PositiveNumber);
  srch->add_option("--degree,-m", search_degree, "Degree")->required()->check(CLI::PositiveNumber);
  srch->add_option("--multistarts", search_cfg.multistarts)->capture_default_str()->check(CLI::PositiveNumber);
  srch->add_option("--max-iter", search_cfg.max_iter)->capture_default_str()->check(CLI::PositiveNumber);
  srch->add_option("--out,-o", out_path, "Output file (default: stdout)");

  std::string known_name;
  auto* known = cub->add_subcommand("known", "Emit a built-in formula");
  known->add_option("--name", known_name, "antipodal, tetrahedron, octahedron or icosahedron")
      ->required();
  known->add_option("--out,-o", out_path, "Output file (default: stdout)");

  // estimate-nm
  int nm_degree = 0, nm_min = 1, nm_max = 0;
  SearchConfig nm_cfg;
  auto* nm = app.add_subcommand("estimate-nm", "Smallest node count reaching degree m");
  nm->add_option("--degree,-m", nm_degree, "Degree")->required()->check(CLI::PositiveNumber);
  nm->add_option("--n-min", nm_min)->capture_default_str()->check(CLI::PositiveNumber);
  nm->add_option("--n-max", nm_max, "Default (m+1)^2")->check(CLI::PositiveNumber);
  nm->add_option("--multistarts", nm_cfg.multistarts)->capture_default_str()->check(CLI::PositiveNumber);
  nm->add_option("--max-iter", nm_cfg.max_iter)->capture_default_str()->check(CLI::PositiveNumber);
  nm->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  nm->add_option("--out,-o", out_path, "Output file (default: stdout)");

  // sharpness
  auto* sharp = app.add_subcommand("sharpness", "Concentrating test functions on the sphere");
  sharp->require_subcommand(1);
  std::string sw_file, sw_known;
  std::vector<double> sw_eps;
  double sw_delta = 0.0;
  int sw_degree = 0, sw_radial = SharpnessQuadrature{}.bump_radial_nodes;
  auto* sweep = sharp->add_subcommand("sweep", "Sweep eps and fit slopes against log(1/eps)");
  sweep->add_option("--cubature", sw_file, "Cubature JSON");
  sweep->add_option("--known", sw_known, "Built-in formula instead of a file");
  sweep->add_option("--eps", sw_eps, "Strictly decreasing list, comma separated")
      ->required()
      ->delimiter(',');
  sweep->add_option("--delta", sw_delta, "Cap radius (default: 0.2 x min node distance, <= 0.2)");
  sweep->add_option("--degree,-m", sw_degree, "Moment degree (default: the formula's)");
  sweep->add_option("--radial-nodes", sw_radial)->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sweep->add_option("--out,-o", out_path, "Output file (default: stdout)");

  // circle
  auto* circ = app.add_subcommand("circle", "Lebedev-Milin experiments on the unit circle");
  circ->require_subcommand(1);
  std::string xi_text = "0.5";
  int c_degree = 0, c_K = 0, rec_random = 0;
  std::optional<double> alpha;

  auto* extremal = circ->add_subcommand("extremal", "Report for u = -2 log|1 - xi z^(m+1)|");
  extremal->add_option("--xi", xi_text, "Complex parameter, e.g. 0.7+0.2i")->capture_default_str();
  extremal->add_option("--degree,-m", c_degree)->capture_default_str()->check(CLI::NonNegativeNumber);
  extremal->add_option("--K", c_K, "Truncation (default: from the tail bound)");
  extremal->add_option("--out,-o", out_path, "Output file (default: stdout)");

  auto* rec = circ->add_subcommand("recursion", "Check k b_k = sum j a_j b_(k-j) for e^v");
  rec->add_option("--xi", xi_text)->capture_default_str();
  rec->add_option("--degree,-m", c_degree)->capture_default_str()->check(CLI::NonNegativeNumber);
  rec->add_option("--random", rec_random, "Use a random series with 2^-|k| decay and this K");
  rec->add_option("--K", c_K, "Indices checked (default: the series length)");
  rec->add_option("--out,-o", out_path, "Output file (default: stdout)");

  auto* neu = circ->add_subcommand("neumann", "Neumann residual of the closed-form solution");
  neu->add_option("--xi", xi_text)->capture_default_str();
  neu->add_option("--degree,-m", c_degree)->capture_default_str()->check(CLI::NonNegativeNumber);
  neu->add_option("--alpha", alpha, "Boundary constant (default: m + 1)");
  neu->add_option("--out,-o", out_path, "Output file (default: stdout)");

  auto* ccub = circ->add_subcommand("cubature", "Roots-of-unity formula and its moments");
  ccub->add_option("--degree,-m", c_degree)->capture_default_str()->check(CLI::NonNegativeNumber);
  ccub->add_option("--out,-o", out_path, "Output file (default: stdout)");

  std::vector<std::string> xi_list{"0.3", "0.5", "0.7+0.2i"};
  std::vector<int> m_list{0, 1, 2, 3};
  auto* csweep = circ->add_subcommand("sweep", "Equality check over a grid of (xi, m)");
  csweep->add_option("--xi", xi_list, "Comma separated complex values")->delimiter(',')->capture_default_str();
  csweep->add_option("--degrees", m_list, "Comma separated degrees")->delimiter(',')->capture_default_str();
  csweep->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  csweep->add_option("--out,-o", out_path, "Output file (default: stdout)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  Emitter emit(args, common.seed, out);
  try {
    // cubature verify
    if (verify->parsed()) {
      const auto doc = read_cubature_file(verify_file);
      const int m = verify_degree > 0 ? verify_degree : doc.formula.target_degree();
      const double tol = common.tol.value_or(1e-12);
      const auto table = residual_table(doc.formula, m);
      double worst = 0.0;
      for (const auto& row : table.rows) worst = std::max(worst, std::abs(row[2].get<double>()));
      const bool ok = sphlab::verify_degree(doc.formula, m, tol);
      out << to_csv(table);
      out << "max_residual," << format_double(worst) << "\n";
      out << "verified," << (ok ? "true" : "false") << "\n";
      return ok ? kSuccess : kNegative;
    }
    // cubature search
    if (srch->parsed()) {
      search_cfg.seed = common.seed;
      search_cfg.tol = common.tol.value_or(search_cfg.tol);
      const auto rep = search(search_nodes, search_degree, search_cfg);
      CubatureDocument doc{rep.best, rep.residual, "search", rep.seed, nullptr};
      json cfg = search_config_json(search_cfg);
      cfg["nodes"] = search_nodes;
      cfg["degree"] = search_degree;
      const json summary{{"converged", rep.converged},
                         {"residual", rep.residual},
                         {"best_start", rep.best_start},
                         {"iterations", rep.iterations}};
      emit.json_result(to_json(doc), cfg, summary, out_path);
      return rep.converged ? kSuccess : kNegative;
    }
    if (known->parsed()) {
      const auto f = known_formula(known_name);
      CubatureDocument doc{f, residual_norm(f, f.target_degree()), "known", std::nullopt, nullptr};
      emit.json_result(to_json(doc), {{"name", known_name}}, {{"residual", doc.residual}}, out_path);
      return kSuccess;
    }
    if (nm->parsed()) {
      nm_cfg.seed = common.seed;
      nm_cfg.tol = common.tol.value_or(nm_cfg.tol);
      if (nm_max == 0) nm_max = (nm_degree + 1) * (nm_degree + 1);
      const auto est = estimate_Nm(nm_degree, nm_min, nm_max, nm_cfg);
      json cfg = search_config_json(nm_cfg);
      cfg["degree"] = nm_degree;
      cfg["n_min"] = nm_min;
      cfg["n_max"] = nm_max;
      const json summary{{"lower_bound", est.lower_bound},
                         {"estimate", est.estimate ? json(*est.estimate) : json(nullptr)},
                         {"open", est.open}};
      emit.table_result(estimate_table(est), format, cfg, summary, out_path);
      return est.estimate ? kSuccess : kNegative;
    }
    if (sweep->parsed()) {
      const auto f = load_formula(sw_file, sw_known);
      const int m = sw_degree > 0 ? sw_degree : f.target_degree();
      SharpnessQuadrature quad;
      quad.grid_degree = common.grid_degree;
      quad.bump_radial_nodes = sw_radial;
      if (common.tol) quad.radial_rel_tol = *common.tol;
      const auto res = sharpness_sweep(f, sw_eps, sw_delta, m, std::nullopt, quad);
      const json cfg{{"cubature", sw_file},  {"known", sw_known},
                     {"eps", sw_eps},        {"delta", res.rows.front().delta},
                     {"degree", m},          {"grid_degree", quad.grid_degree},
                     {"radial_nodes", quad.bump_radial_nodes},
                     {"radial_rel_tol", quad.radial_rel_tol}};
      const json summary{{"log_mass_slope", res.log_mass_slope},
                         {"log_mass_intercept", res.log_mass_intercept},
                         {"energy_slope", res.energy_slope},
                         {"energy_intercept", res.energy_intercept},
                         {"implied_constant", res.implied_constant},
                         {"reference_constant", 1.0 / (4.0 * std::numbers::pi * res.rows.front().num_nodes)}};
      emit.table_result(sharpness_table(res), format, cfg, summary, out_path);
      err << fmt::format("log_mass_slope={} energy_slope={} implied_constant={}\n",
                         format_double(res.log_mass_slope), format_double(res.energy_slope),
                         format_double(res.implied_constant));
      return kSuccess;
    }
    if (extremal->parsed()) {
      const circle::CircleExtremal e{parse_complex(xi_text), c_degree};
      const double tol = common.tol.value_or(1e-10);
      const int K = c_K > 0 ? c_K : circle::suggest_truncation(e, tol);
      const auto u = circle::extremal_series(e, K, tol);
      const auto rep = circle::lm_report(u, e.m);
      const auto mom = circle::circle_moments(u.sample(circle::sample_count(K)), e.m);
      json moments = json::array();
      for (const auto& c : mom) moments.push_back(complex_json(c));
      json payload{{"xi", complex_json(e.xi)}, {"m", e.m},        {"K", K},
                   {"lhs", rep.lhs},           {"rhs", rep.rhs},  {"gap", rep.gap},
                   {"expected_lhs", std::log(1.0 / (1.0 - std::norm(e.xi)))},
                   {"moments", moments},       {"series", series_json(u)}};
      emit.json_result(std::move(payload), {{"xi", xi_text}, {"degree", e.m}, {"K", K}, {"tol", tol}},
                       {{"gap", rep.gap}}, out_path);
      return kSuccess;
    }
    if (rec->parsed()) {
      const double tol = common.tol.value_or(1e-8);
      circle::FourierSeries a;
      json cfg{{"tol", tol}};
      if (rec_random > 0) {
        std::mt19937_64 rng(common.seed);
        std::normal_distribution<double> n(0.0, 1.0);
        a = circle::FourierSeries(rec_random);
        for (int k = 1; k <= rec_random; ++k) a.set(k, circle::cplx(n(rng), n(rng)) * std::ldexp(1.0, -k));
        cfg["random"] = rec_random;
        cfg["seed"] = common.seed;
      } else {
        const circle::CircleExtremal e{parse_complex(xi_text), c_degree};
        a = circle::extremal_series(e, circle::suggest_truncation(e));
        cfg["xi"] = xi_text;
        cfg["degree"] = c_degree;
      }
      const int K = c_K > 0 ? c_K : a.max_index();
      const auto chk = circle::product_recursion_check(a, K);
      cfg["K"] = K;
      const bool ok = chk.defect < tol;
      emit.json_result({{"defect", chk.defect}, {"aliasing", chk.aliasing}, {"passed", ok}}, cfg,
                       {{"defect", chk.defect}}, out_path);
      return ok ? kSuccess : kNegative;
    }
    if (neu->parsed()) {
      const double tol = common.tol.value_or(1e-8);
      const circle::CircleExtremal e{parse_complex(xi_text), c_degree};
      const double a = alpha.value_or(e.m + 1.0);
      const auto v = circle::closed_form_v(e, circle::suggest_dtn_truncation(e));
      const double res = circle::neumann_residual(v, a);
      const double b0 = circle::exp_coefficients(v, 0)[0].real();
      const bool ok = res < tol;
      emit.json_result({{"residual", res}, {"b0", b0}, {"alpha", a}, {"K", v.max_index()}, {"passed", ok}},
                       {{"xi", xi_text}, {"degree", e.m}, {"alpha", a}, {"tol", tol}},
                       {{"residual", res}}, out_path);
      return ok ? kSuccess : kNegative;
    }
    if (ccub->parsed()) {
      const auto c = circle::roots_of_unity_cubature(c_degree);
      json nodes = json::array(), moments = json::array();
      for (const auto& z : c.nodes) nodes.push_back(complex_json(z));
      bool ok = true;
      for (int j = 1; j <= c_degree + 1; ++j) {
        const auto mj = c.moment(j);
        moments.push_back({j, mj.real(), mj.imag()});
        if (j <= c_degree && std::abs(mj) >= 1e-14) ok = false;
      }
      if (std::abs(c.moment(c_degree + 1) - 1.0) >= 1e-14) ok = false;
      emit.json_result({{"m", c_degree}, {"nodes", nodes}, {"weights", c.weights}, {"moments", moments},
                        {"degree_exactly_m", ok}},
                       {{"degree", c_degree}}, {{"degree_exactly_m", ok}}, out_path);
      return ok ? kSuccess : kNegative;
    }
    if (csweep->parsed()) {
      const double tol = common.tol.value_or(1e-10);
      std::vector<circle::cplx> xis;
      for (const auto& s : xi_list) xis.push_back(parse_complex(s));
      const auto rows = circle::xi_sweep(xis, m_list, tol);
      double worst_gap = 0.0;
      for (const auto& r : rows) worst_gap = std::max(worst_gap, std::abs(r.report.gap));
      emit.table_result(xi_sweep_table(rows), format, {{"xi", xi_list}, {"degrees", m_list}, {"tol", tol}},
                        {{"max_abs_gap", worst_gap}}, out_path);
      return kSuccess;
    }
  } catch (const CubatureFormatError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace sphlab::cli
