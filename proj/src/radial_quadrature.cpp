#include "sphlab/radial_quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

namespace sphlab {

namespace {

struct Piece {
  double a, b, value, error, l1;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece kronrod_piece(const std::function<double(double)>& f, double a, double b) {
  Piece p{a, b, 0.0, 0.0, 0.0};
  p.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &p.error,
                                                                          &p.l1);
  // Boost reports the Kronrod-Gauss difference on the reference interval.
  p.error *= 0.5 * (b - a);
  return p;
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol) {
  if (a == b) return 0.0;
  // Global bisection of the worst piece, QUADPACK style. Stops when the summed
  // error estimate meets the tolerance or hits the rounding floor.
  constexpr int kMaxPieces = 4000;
  constexpr double kRound = 50.0 * std::numeric_limits<double>::epsilon();
  std::priority_queue<Piece> heap;
  heap.push(kronrod_piece(f, a, b));
  double value = heap.top().value, error = heap.top().error, l1 = heap.top().l1;
  for (int n = 1;; ++n) {
    const double target = std::max({abs_tol, rel_tol * std::abs(value), kRound * l1});
    if (!std::isfinite(value)) break;
    if (error <= target) return value;
    if (n >= kMaxPieces) break;
    const Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    const Piece lo = kronrod_piece(f, worst.a, mid), hi = kronrod_piece(f, mid, worst.b);
    value += lo.value + hi.value - worst.value;
    error += lo.error + hi.error - worst.error;
    l1 += lo.l1 + hi.l1 - worst.l1;
    heap.push(lo);
    heap.push(hi);
  }
  throw std::runtime_error("integrate_adaptive: no convergence on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "], error estimate " + std::to_string(error));
}

double integrate_geometric(const std::function<double(double)>& f, double a, double b,
                           double rel_tol) {
  if (!(a > 0.0) || !(b > a)) {
    throw std::invalid_argument("integrate_geometric: need 0 < a < b");
  }
  const int pieces = std::max(1, static_cast<int>(std::ceil(std::log2(b / a))));
  const double ratio = std::pow(b / a, 1.0 / pieces);
  double total = 0.0;
  double lo = a;
  for (int i = 0; i < pieces; ++i) {
    const double hi = (i + 1 == pieces) ? b : lo * ratio;
    total += integrate_adaptive(f, lo, hi, rel_tol, 0.0);
    lo = hi;
  }
  return total;
}

}  // namespace sphlab
