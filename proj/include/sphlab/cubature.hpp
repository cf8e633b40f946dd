#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sphlab/sphere_harmonics.hpp"

namespace sphlab {

/// Nodes on S^2 with nonnegative weights summing to one, together with the
/// degree of precision the formula is meant to have.
class CubatureFormula {
public:
  /// Throws std::invalid_argument if there are no nodes, the sizes differ, a
  /// weight is negative or non-finite, the weights do not sum to 1 within
  /// 1e-12, or target_degree < 1.
  CubatureFormula(std::vector<UnitVec3> nodes, std::vector<double> weights, int target_degree);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<UnitVec3>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  int target_degree() const { return target_degree_; }

private:
  std::vector<UnitVec3> nodes_;
  std::vector<double> weights_;
  int target_degree_;
};

/// sum_i nu_i Y_{k,j}(x_i) for 1 <= k <= m, |j| <= k, in flat order
/// starting at (1,-1). Length m^2 + 2m. Throws std::domain_error for m < 1.
std::vector<double> moment_residuals(const CubatureFormula& f, int m);

/// Euclidean norm of moment_residuals.
double residual_norm(const CubatureFormula& f, int m);

/// True iff every residual is at most tol in magnitude, the weights are
/// nonnegative and they sum to 1 within tol.
bool verify_degree(const CubatureFormula& f, int m, double tol);

/// (floor(m/2) + 1)^2.
int lower_bound(int m);

/// Equal-weight formulas: "antipodal" (degree 1), "tetrahedron" (2),
/// "octahedron" (3), "icosahedron" (5). Throws std::invalid_argument for
/// any other name.
CubatureFormula known_formula(std::string_view name);

/// R applied to every node.
CubatureFormula rotated(const CubatureFormula& f, const Eigen::Matrix3d& rotation);

/// Rotate so the first node sits at the north pole and the second on the
/// phi = 0 meridian. Residual norms are unchanged.
CubatureFormula canonical_gauge(const CubatureFormula& f);

struct SearchConfig {
  int multistarts = 64;
  std::uint64_t seed = 0;
  int max_iter = 400;
  double tol = 1e-10;
  /// 0 means: SPHLAB_THREADS if set, else hardware concurrency.
  int threads = 0;
};

struct SearchReport {
  CubatureFormula best;
  double residual = 0.0;
  int multistarts = 0;
  std::uint64_t seed = 0;
  int iterations = 0;  // iterations spent by the start that produced `best`
  int best_start = 0;
  bool converged = false;
};

/// Multistart Levenberg-Marquardt on the squared moment residuals over node
/// angles and weight parameters t_i (nu_i = t_i^2 / sum t^2). Start s draws
/// from an RNG seeded with seed + s, so the report only depends on the
/// config. The best formula is returned in canonical gauge. Throws
/// std::invalid_argument for N < 1 or m < 1.
SearchReport search(int num_nodes, int m, const SearchConfig& config);

struct NmRow {
  int num_nodes = 0;
  double best_residual = 0.0;
  bool converged = false;
};

struct NmEstimate {
  int degree = 0;
  int lower_bound = 0;
  std::vector<NmRow> rows;
  /// Smallest converged node count; an upper bound on N_m.
  std::optional<int> estimate;
  /// True when the exact value is not known analytically (m >= 3).
  bool open = false;
  /// Witness formula for `estimate`.
  std::optional<SearchReport> witness;
};

/// One search per N in [n_min, n_max], stopping at the first converged N.
/// Throws std::invalid_argument when the range is empty.
NmEstimate estimate_Nm(int m, int n_min, int n_max, const SearchConfig& config);

/// Worker count used for multistarts under `config`.
int resolve_thread_count(const SearchConfig& config);

}  // namespace sphlab
