#pragma once

#include <cmath>
#include <string>

#include "fenchelkit/core/energy.hpp"
#include "fenchelkit/core/errors.hpp"
#include "fenchelkit/core/numerics.hpp"

namespace fenchelkit {

/// t >= 0 with f'(x, t) = s for a radial profile; 0 when s does not exceed
/// the slope at the origin (the subdifferential at 0 covers it).
inline double radial_inverse_slope(const RadialProfile& f, const Vec2N& x, double s) {
  if (s <= f.slope_at_origin(x)) return 0.0;
  return numerics::solve_increasing([&](double t) { return f.df(x, t); },
                                    [&](double t) { return f.d2f(x, t); }, s);
}

/// (F*)'(x, z) = (F')^{-1}(x, z).
///
/// Radial energies reduce to a scalar root find along z. Otherwise a damped
/// Newton iteration on F'(x, xi) = z with step halving until the residual
/// decreases; `guess` warm-starts it.
inline Vec2N conj_grad(const EnergyDensity& F, const Vec2N& x, const Vec2N& z,
                       const Vec2N* guess = nullptr) {
  if (!z.finite()) throw ValidationError("conj_grad: non-finite z");
  if (const RadialProfile* f = F.radial()) {
    const double s = norm(z);
    const double t = radial_inverse_slope(*f, x, s);
    return t == 0.0 ? Vec2N::zero(z.n) : (t / s) * z;
  }
  Vec2N xi = guess ? *guess : 0.5 * z;
  Vec2N r = F.model_derivative(x, xi) - z;
  double res = norm(r);
  const double target = 1e-13 * (1 + norm(z));
  for (int it = 0; it < 200 && res > target; ++it) {
    Vec2N d;
    if (!F.hessian(x, xi).solve_spd(-r, d)) d = -r;
    double step = 1.0;
    bool moved = false;
    while (step > 1e-20) {
      const Vec2N trial = xi + step * d;
      const Vec2N rt = F.model_derivative(x, trial) - z;
      if (norm(rt) < res) {
        xi = trial;
        r = rt;
        res = norm(rt);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  if (!(res <= 1e-10 * (1 + norm(z))))
    throw ConvergenceError("conj_grad: Newton residual " + std::to_string(res) + " at x=" +
                           to_string(x) + " z=" + to_string(z));
  return xi;
}

}  // namespace fenchelkit
