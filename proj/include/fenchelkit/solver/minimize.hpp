#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "fenchelkit/discretize/constraint.hpp"
#include "fenchelkit/discretize/operators.hpp"
#include "fenchelkit/solver/problem.hpp"

namespace fenchelkit {

enum class MinimizeStatus { converged, eps_stationary, nonconverged };

inline const char* to_string(MinimizeStatus s) {
  switch (s) {
    case MinimizeStatus::converged: return "CONVERGED";
    case MinimizeStatus::eps_stationary: return "EPS_STATIONARY";
    default: return "NONCONVERGED";
  }
}

struct MinimizeResult {
  ScalarField u;
  double energy = 0.0;
  double warm_energy = 0.0;
  double stationarity = 0.0;  // sup norm of the projected gradient
  int iterations = 0;
  MinimizeStatus status = MinimizeStatus::nonconverged;
  bool ok() const { return status != MinimizeStatus::nonconverged; }
};

/// Sup norm of the gradient with the components that push into an active
/// obstacle removed: g_i at free interior nodes, min(g_i, 0) at nodes on
/// the obstacle, 0 on the boundary. For every w in K,
///   <g, w - u> >= -stationarity * sum_i |w_i - u_i|,
/// and sum_i |eta_i| h^n <= |grad_h eta|_1 for eta vanishing on the boundary.
inline double projected_stationarity(const ConstraintSet& K, const ScalarField& u, const ScalarField& g) {
  const Grid& grid = K.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    if (grid.on_boundary(i)) continue;
    double r = g[i];
    if (K.obstacle_active(i) && u[i] <= (*K.obstacle())[i]) r = std::min(r, 0.0);
    s = std::max(s, std::abs(r));
  }
  return s;
}

namespace detail {

/// Largest curvature of the discrete energy near u by power iteration on
/// finite differences of its gradient.
template <class D>
double curvature_estimate(const Grid& g, const D& density, const ScalarField& u, const ScalarField& gu) {
  ScalarField v(g);
  for (std::size_t i = 0; i < g.nodes(); ++i) {
    if (g.on_boundary(i)) continue;
    const auto [a, b] = g.node_coords(i);
    v[i] = ((a + b) % 2 == 0) ? 1.0 : -1.0;
  }
  double L = 0.0;
  const double delta = 1e-4 * g.h() * (1.0 + max_abs(u));
  for (int it = 0; it < 8; ++it) {
    const double nv = std::sqrt(inner(v, v));
    if (nv == 0.0) break;
    v = (1.0 / nv) * v;
    const ScalarField w = (1.0 / delta) * (energy_gradient(g, density, u + delta * v) - gu);
    L = std::sqrt(inner(w, w));
    v = w;
  }
  return std::max(L, 1e-12);
}

}  // namespace detail

/// eps-almost minimizer of the discrete energy of `density` over K.
///
/// Accelerated projected gradient with backtracking (step halved until the
/// curvature along the step is below 1/step) and adaptive momentum restart.
/// The result never has a higher energy than the warm start. Stops when the projected gradient is
/// below max(tol.stat, eps) h^n. At that level
///   sum_c sigma_c . grad_h(w - u) h^n >= -eps |grad_h(w - u)|_1
/// for every w in K, the discrete form of the perturbed minimality that
/// Ekeland's principle provides. The iteration cap returns the last
/// iterate flagged nonconverged.
template <class D>
MinimizeResult almost_minimize(const Problem& P, const D& density, const ConstraintSet& K, double eps,
                               const ScalarField& warm_start) {
  const Grid& g = P.grid;
  if (!(eps > 0.0)) throw ValidationError("almost_minimize: eps must be positive");
  if (!K.contains(warm_start, 1e-12)) throw ValidationError("almost_minimize: warm start is not in K");
  const double hn = g.cell_volume();
  const double threshold = std::max(P.tol.stat, eps) * hn;

  MinimizeResult res{warm_start};
  ScalarField x = K.project(warm_start);
  auto [fx, gx] = energy_and_gradient(g, density, x);
  res.warm_energy = fx;
  double st = projected_stationarity(K, x, gx);
  const ScalarField warm = x;
  const double warm_st = st;
  auto finish = [&](MinimizeStatus s, int it) {
    if (fx > res.warm_energy) {
      // never return worse than the warm start
      x = warm;
      fx = res.warm_energy;
      st = warm_st;
    }
    res.u = x;
    res.energy = fx;
    res.stationarity = st;
    res.iterations = it;
    res.status = s;
    return res;
  };
  if (st <= threshold) return finish(st <= P.tol.stat * hn ? MinimizeStatus::converged : MinimizeStatus::eps_stationary, 0);

  double L = detail::curvature_estimate(g, density, x, gx);
  ScalarField x_prev = x;
  double tk = 1.0;
  for (int it = 1; it <= P.tol.max_iterations; ++it) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    const double beta = (tk - 1.0) / t_next;
    ScalarField y = x;
    double fy = fx;
    ScalarField gy = gx;
    if (beta != 0.0) {
      y = x + beta * (x - x_prev);
      std::tie(fy, gy) = energy_and_gradient(g, density, y);
    }
    ScalarField xn(g), gxn(g);
    double fxn = 0.0;
    bool bounded = false;
    for (int ls = 0; ls < 80; ++ls) {
      xn = K.project(y - (1.0 / L) * gy);
      std::tie(fxn, gxn) = energy_and_gradient(g, density, xn);
      const ScalarField d = xn - y;
      const double dd = inner(d, d);
      // curvature along the step, then the quadratic upper bound where the
      // energy difference is above rounding
      bool ok = inner(gxn - gy, d) <= L * dd;
      if (ok && std::abs(fxn - fy) > 1e-10 * (1.0 + std::abs(fy)))
        ok = fxn <= fy + inner(gy, d) + 0.5 * L * dd;
      if (ok) {
        bounded = true;
        break;
      }
      L *= 2.0;
    }
    if (!bounded) return finish(MinimizeStatus::nonconverged, it);
    // adaptive restart when the momentum points uphill
    tk = inner(gy, xn - x) > 0.0 ? 1.0 : t_next;
    x_prev = std::move(x);
    x = std::move(xn);
    fx = fxn;
    gx = std::move(gxn);
    st = projected_stationarity(K, x, gx);
    if (st <= threshold)
      return finish(st <= P.tol.stat * hn ? MinimizeStatus::converged : MinimizeStatus::eps_stationary, it);
    L *= 0.95;
  }
  return finish(MinimizeStatus::nonconverged, P.tol.max_iterations);
}

}  // namespace fenchelkit
