#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "fenchelkit/core/energy.hpp"
#include "fenchelkit/core/errors.hpp"
#include "fenchelkit/core/numerics.hpp"
#include "fenchelkit/extension/inverse_gradient.hpp"
#include "fenchelkit/legendre/conjugate.hpp"

namespace fenchelkit {

/// How the scalar problem sup_{0 <= r <= k} (r |xi| - f*(r)) is solved for
/// radial energies.
enum class RadialSolve {
  /// golden-section search over r, using only conjugate values
  golden_section,
  /// first-order optimality: the sup is F(xi) while f'(|xi|) <= k and
  /// k |xi| - f*(k) beyond; exact, and much cheaper inside the solver
  optimality,
};

struct RestrictedValue {
  double value;
  Vec2N derivative;
};

class LocalRestricted;

/// F_k(x, xi) = sup_{|z| <= k} (xi . z - F*(x, z)) and its derivative.
///
/// Radial energies use the scalar reduction above; the derivative is
/// F'(x, xi) where |F'| <= k and k xi / |xi| beyond. Other energies run a
/// projected gradient ascent on the ball and report the maximizer as the
/// derivative; this needs a conjugate handle with a gradient.
class RestrictedConjugate {
 public:
  RestrictedConjugate(EnergyDensity F, ConjugateHandle conj, double k,
                      RadialSolve method = RadialSolve::golden_section)
      : F_(std::move(F)), conj_(std::move(conj)), k_(k), method_(method) {
    if (!(k_ > 0.0) || !std::isfinite(k_))
      throw ValidationError("RestrictedConjugate: k must be positive and finite");
    if (conj_.domain_radius() < k_ * (1 - 1e-12))
      throw ValidationError("RestrictedConjugate: conjugate handle is finite only on B_" +
                            std::to_string(conj_.domain_radius()) + ", need B_" +
                            std::to_string(k_));
    if (!F_.radial() && conj_.kind() != ConjugateKind::analytic)
      throw ValidationError("RestrictedConjugate: non-radial energies need a differentiable "
                            "(analytic) conjugate handle");
  }

  double k() const { return k_; }
  RadialSolve method() const { return method_; }
  const EnergyDensity& energy() const { return F_; }
  const ConjugateHandle& conjugate() const { return conj_; }

  double operator()(const Vec2N& x, const Vec2N& xi) const { return evaluate(x, xi).value; }
  double value(const Vec2N& x, const Vec2N& xi) const { return evaluate(x, xi).value; }
  Vec2N derivative(const Vec2N& x, const Vec2N& xi) const { return evaluate(x, xi).derivative; }

  RestrictedValue evaluate(const Vec2N& x, const Vec2N& xi) const {
    if (!xi.finite()) throw ValidationError("F_k: non-finite argument");
    if (F_.radial()) return radial(x, xi);
    return generic(x, xi);
  }

  /// Evaluator for a fixed x with the x-only work done once.
  LocalRestricted bind(const Vec2N& x) const;

 private:
  Vec2N radial_derivative(const Vec2N& x, const Vec2N& xi) const {
    const Vec2N g = F_.derivative(x, xi);
    const double len = norm(g);
    if (len <= k_) return g;
    return (k_ / norm(xi)) * xi;
  }

  RestrictedValue radial(const Vec2N& x, const Vec2N& xi) const {
    const double t = norm(xi);
    if (t == 0.0) return {0.0, Vec2N::zero(xi.n)};
    const Vec2N e = Vec2N::unit(xi.n, 0);
    if (method_ == RadialSolve::optimality) {
      const RadialProfile& f = *F_.radial();
      const double tk = radial_inverse_slope(f, x, k_);
      if (t <= tk) return {f.f(x, t), radial_derivative(x, xi)};
      return {k_ * t - conj_(x, k_ * e).value(), radial_derivative(x, xi)};
    }
    auto phi = [&](double r) {
      const ExtReal c = conj_(x, r * e);
      return c.is_finite() ? r * t - c.value() : -INFINITY;
    };
    const auto best = numerics::golden_section_max(phi, 0.0, k_, 1e-10 * (1 + k_ * t), 200);
    return {best.value, radial_derivative(x, xi)};
  }

  RestrictedValue generic(const Vec2N& x, const Vec2N& xi) const {
    // interior maximizer: z* = F'(xi) and the sup equals F(xi)
    const Vec2N g0 = F_.model_derivative(x, xi);
    if (norm(g0) <= k_) return {F_(x, xi), g0};

    Vec2N z = project_ball(g0, k_);
    Vec2N inner = conj_grad(F_, x, z);
    auto psi = [&](const Vec2N& zz, const Vec2N& in) { return dot(xi, zz) - (dot(zz, in) - F_(x, in)); };
    double val = psi(z, inner);
    Vec2N grad = xi - inner;
    double alpha = 1.0 / (1.0 + norm(grad));
    Vec2N prev_z, prev_grad;
    bool have_prev = false;
    const double tol = 1e-12 * (1 + k_);
    for (int it = 0; it < 5000; ++it) {
      const double station = norm(z - project_ball(z + grad, k_));
      if (station <= tol) return {val, z};
      if (have_prev) {
        const Vec2N s = z - prev_z, y = grad - prev_grad;
        const double sy = -dot(s, y);
        if (sy > 0.0) alpha = std::clamp(dot(s, s) / sy, 1e-12, 1e12);
      }
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        const Vec2N trial = project_ball(z + alpha * grad, k_);
        const Vec2N trial_inner = conj_grad(F_, x, trial, &inner);
        const double trial_val = psi(trial, trial_inner);
        // near the maximizer value differences drop below rounding, so
        // progress is measured by stationarity instead of by value
        const bool ok = station > 1e-6 * (1 + k_)
                            ? trial_val >= val + 1e-4 * dot(grad, trial - z)
                            : norm(trial - project_ball(trial + xi - trial_inner, k_)) < station;
        if (ok) {
          prev_z = z;
          prev_grad = grad;
          have_prev = true;
          z = trial;
          inner = trial_inner;
          val = trial_val;
          grad = xi - inner;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        // rounding floor: stationarity at the level the conjugate gradient allows
        if (station <= 1e-9 * (1 + k_)) return {val, z};
        break;
      }
    }
    throw ConvergenceError("F_k: projected ascent did not converge at x=" + to_string(x) +
                           " xi=" + to_string(xi) + " k=" + std::to_string(k_));
  }

  EnergyDensity F_;
  ConjugateHandle conj_;
  double k_;
  RadialSolve method_;

  friend class LocalRestricted;
};

/// F_k at a fixed point x. For radial energies with the optimality rule the
/// threshold t_k = (f')^{-1}(k) and f*(k) are computed once.
class LocalRestricted {
 public:
  LocalRestricted(const RestrictedConjugate& parent, const Vec2N& x) : parent_(&parent), x_(x) {
    if (const RadialProfile* f = parent.F_.radial(); f && parent.method_ == RadialSolve::optimality) {
      profile_ = f;
      tk_ = radial_inverse_slope(*f, x, parent.k_);
      fstar_k_ = parent.conj_(x, parent.k_ * Vec2N::unit(x.n, 0)).value();
    }
  }

  RestrictedValue evaluate(const Vec2N& xi) const {
    if (!profile_) return parent_->evaluate(x_, xi);
    const double t = norm(xi);
    if (t == 0.0) return {0.0, Vec2N::zero(xi.n)};
    const double k = parent_->k_;
    if (t <= tk_) return {profile_->f(x_, t), clamp(parent_->F_.derivative(x_, xi), xi)};
    return {k * t - fstar_k_, (k / t) * xi};
  }

  double value(const Vec2N& xi) const {
    if (!profile_) return parent_->evaluate(x_, xi).value;
    const double t = norm(xi);
    if (t <= tk_) return profile_->f(x_, t);
    return parent_->k_ * t - fstar_k_;
  }

  const Vec2N& x() const { return x_; }

 private:
  Vec2N clamp(const Vec2N& g, const Vec2N& xi) const {
    const double k = parent_->k_;
    if (norm(g) <= k) return g;
    return (k / norm(xi)) * xi;
  }

  const RestrictedConjugate* parent_;
  Vec2N x_;
  const RadialProfile* profile_ = nullptr;
  double tk_ = 0.0;
  double fstar_k_ = 0.0;
};

inline LocalRestricted RestrictedConjugate::bind(const Vec2N& x) const { return {*this, x}; }

}  // namespace fenchelkit
