#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "fenchelkit/core/energy.hpp"
#include "fenchelkit/discretize/constraint.hpp"
#include "fenchelkit/discretize/grid.hpp"
#include "fenchelkit/discretize/operators.hpp"

namespace fenchelkit {

struct Tolerances {
  double stat = 1e-8;     // stationarity threshold, times h^n
  double vi = 1e-6;       // dis-var margins
  double el = 1e-6;       // Euler-Lagrange / VI margins, relative to |grad eta|_1
  double outer = 1e-6;    // |u_J - u_{J-1}|_1 for the outer stop
  double fenchel = 1e-8;  // integrated Fenchel identity, relative
  double dual = 1e-6;     // dual bound, relative
  int max_iterations = 200000;
};

/// The discrete problem min over K of sum_c F(x_c, grad_h v) h^n, with the
/// comparison function w0 and exponent t > 1 of the integrability
/// hypothesis F(., t grad w0) in L^1.
struct Problem {
  Grid grid;
  EnergyDensity F;
  ConstraintSet K;
  ScalarField w0;
  double t = 2.0;
  Tolerances tol;
  std::uint64_t seed = 1;
};

/// Discrete harmonic extension of the boundary data of K: the minimizer of
/// the Dirichlet energy with those boundary values, by conjugate gradients
/// on the interior nodes.
inline ScalarField harmonic_extension(const ConstraintSet& K) {
  const Grid& g = K.grid();
  const auto Q = make_energy("power_p", {{"p", 2.0}});
  ScalarField base(g);
  for (std::size_t i = 0; i < g.nodes(); ++i)
    if (g.on_boundary(i)) base[i] = K.boundary_values()[i];
  // A v = grad I(v) for v zero on the boundary; solve A v = -grad I(base)
  ScalarField r = -1.0 * energy_gradient(g, Q, base);
  ScalarField v(g), p = r;
  double rr = inner(r, r);
  const double stop = 1e-30 * std::max(1.0, rr);
  for (std::size_t it = 0; it < 10 * g.nodes() && rr > stop; ++it) {
    const ScalarField Ap = energy_gradient(g, Q, p);
    const double alpha = rr / inner(p, Ap);
    v = v + alpha * p;
    r = r - alpha * Ap;
    const double rr_new = inner(r, r);
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  return base + v;
}

inline Problem make_problem(const Grid& g, EnergyDensity F, ConstraintSet K,
                            std::optional<ScalarField> w0 = std::nullopt, double t = 2.0, Tolerances tol = {}) {
  require_same_grid(g, K.grid(), "Problem");
  if (!(t > 1.0) || !std::isfinite(t)) throw ValidationError("Problem: t must be > 1");
  ScalarField w = w0 ? K.project(*w0) : K.project(harmonic_extension(K));
  if (w0 && !K.contains(*w0, 1e-12)) throw ValidationError("Problem: w0 is not in K");
  return Problem{g, std::move(F), std::move(K), std::move(w), t, tol, 1};
}

}  // namespace fenchelkit
