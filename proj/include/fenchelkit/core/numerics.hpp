#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "fenchelkit/core/errors.hpp"

namespace fenchelkit::numerics {

/// Solves slope(t) = target for t >= 0, where slope is continuous and
/// strictly increasing on [0, inf) with slope(0) < target. Safeguarded
/// Newton: a Newton step is taken when it stays inside the current bracket,
/// otherwise the bracket is bisected.
template <class Slope, class Curvature>
double solve_increasing(const Slope& slope, const Curvature& curvature, double target) {
  double lo = 0.0, hi = 1.0;
  int expansions = 0;
  while (slope(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 2000 || !std::isfinite(hi))
      throw ConvergenceError("solve_increasing: cannot bracket target " + std::to_string(target));
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    const double r = slope(t) - target;
    if (r == 0.0) return t;
    if (r > 0.0)
      hi = t;
    else
      lo = t;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return t;
    const double d = curvature(t);
    double next = (d > 0.0 && std::isfinite(d)) ? t - r / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 2.0 * std::numeric_limits<double>::epsilon() * t) return next;
    t = next;
  }
  return t;
}

struct ScalarMax {
  double arg;
  double value;
  int iterations;
};

/// Golden-section search for the maximum of a unimodal function on [a, b].
/// Stops when the bracket is narrower than `tol`; the endpoints are compared
/// explicitly since concave maximizers often sit on the boundary.
template <class Fn>
ScalarMax golden_section_max(const Fn& phi, double a, double b, double tol, int max_iter) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = phi(x1), f2 = phi(x2);
  int it = 0;
  while (b - a > tol) {
    if (++it > max_iter)
      throw ConvergenceError("golden_section_max: no convergence on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]");
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = phi(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = phi(x1);
    }
  }
  ScalarMax best{x1, f1, it};
  if (f2 > best.value) best = {x2, f2, it};
  const double fa = phi(a), fb = phi(b);
  if (fa > best.value) best = {a, fa, it};
  if (fb > best.value) best = {b, fb, it};
  return best;
}

}  // namespace fenchelkit::numerics
