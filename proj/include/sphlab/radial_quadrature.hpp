#pragma once

#include <functional>

namespace sphlab {

/// Adaptive Gauss-Kronrod (15-point) integral of f over [a, b] by global
/// bisection. Throws std::runtime_error when the error estimate stays above
/// max(abs_tol, rel_tol * |I|, rounding floor) after 4000 pieces.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-13, double abs_tol = 0.0);

/// Same, but [a, b] (0 < a < b) is first split into geometric pieces of
/// ratio at most 2 so that integrands like r^-3 near a are resolved on
/// every scale.
double integrate_geometric(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-13);

}  // namespace sphlab
