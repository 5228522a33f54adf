#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fenchelkit/core/energy.hpp"
#include "fenchelkit/core/errors.hpp"
#include "fenchelkit/core/ext_real.hpp"
#include "fenchelkit/extension/inverse_gradient.hpp"
#include "fenchelkit/legendre/sampled_convex.hpp"

namespace fenchelkit {

enum class ConjugateKind { analytic, radial_1d_grid, nd_grid };

inline const char* to_string(ConjugateKind k) {
  switch (k) {
    case ConjugateKind::analytic: return "analytic";
    case ConjugateKind::radial_1d_grid: return "radial_1d_grid";
    case ConjugateKind::nd_grid: return "nd_grid";
  }
  return "?";
}

struct ConjugateValue {
  ExtReal value;
  Vec2N gradient;
};

namespace detail {

class ConjugateModel {
 public:
  virtual ~ConjugateModel() = default;
  virtual ConjugateValue eval(const Vec2N& x, const Vec2N& z, bool want_gradient) const = 0;
};

class AnalyticConjugate final : public ConjugateModel {
 public:
  explicit AnalyticConjugate(EnergyDensity F) : F_(std::move(F)) {}

  ConjugateValue eval(const Vec2N& x, const Vec2N& z, bool) const override {
    if (const RadialProfile* f = F_.radial()) {
      const double s = norm(z);
      const double t = radial_inverse_slope(*f, x, s);
      if (t == 0.0) return {ExtReal(0.0), Vec2N::zero(z.n)};
      return {ExtReal(s * t - f->f(x, t)), (t / s) * z};
    }
    const Vec2N xi = conj_grad(F_, x, z);
    return {ExtReal(dot(z, xi) - F_(x, xi)), xi};
  }

 private:
  EnergyDensity F_;
};

/// Exact discrete transform of the radial profile sampled on [-R, R] at a
/// fixed x. The profile is continued affinely past R, so the result is +inf
/// for |z| > f'(R).
class RadialGridConjugate final : public ConjugateModel {
 public:
  RadialGridConjugate(const RadialProfile& f, const Vec2N& x, double R, int nodes)
      : table_(build(f, x, R, nodes)) {}

  ConjugateValue eval(const Vec2N&, const Vec2N& z, bool want_gradient) const override {
    const double s = norm(z);
    const ExtReal v = table_(s);
    Vec2N g = Vec2N::zero(z.n);
    if (want_gradient && v.is_finite() && s > 0.0) g = (table_.slope_at(s) / s) * z;
    return {v, g};
  }

 private:
  static SampledConvex1D build(const RadialProfile& f, const Vec2N& x, double R, int nodes) {
    std::vector<double> t(static_cast<std::size_t>(nodes)), v(t.size());
    for (int i = 0; i < nodes; ++i) {
      // symmetric formula so the middle node of an odd grid is exactly 0
      const double ti = R * (2.0 * i - (nodes - 1)) / (nodes - 1);
      t[static_cast<std::size_t>(i)] = ti;
      v[static_cast<std::size_t>(i)] = f.f(x, std::abs(ti));
    }
    const double slope = f.df(x, R);
    return conjugate_1d(SampledConvex1D(std::move(t), std::move(v), ExtReal(-slope), ExtReal(slope)));
  }

  SampledConvex1D table_;
};

/// sup over lattice points xi of the box [-R, R]^n inside the ball B_R of
/// xi . z - F(x, xi). A lower bound of F* that is exact up to the lattice
/// spacing while the maximizer lies inside the ball.
class NdGridConjugate final : public ConjugateModel {
 public:
  NdGridConjugate(const EnergyDensity& F, const Vec2N& x, double R, int resolution) {
    const int n = x.n;
    const double h = 2.0 * R / (resolution - 1);
    for (int i = 0; i < resolution; ++i) {
      const double a = -R + h * i;
      if (n == 1) {
        add(F, x, Vec2N(a));
        continue;
      }
      for (int j = 0; j < resolution; ++j) {
        const Vec2N xi(a, -R + h * j);
        if (norm(xi) <= R * (1 + 1e-12)) add(F, x, xi);
      }
    }
  }

  ConjugateValue eval(const Vec2N&, const Vec2N& z, bool) const override {
    double best = -INFINITY;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const double v = dot(pts_[i], z) - vals_[i];
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    return {ExtReal(best), pts_[arg]};
  }

 private:
  void add(const EnergyDensity& F, const Vec2N& x, const Vec2N& xi) {
    pts_.push_back(xi);
    vals_.push_back(F(x, xi));
  }

  std::vector<Vec2N> pts_;
  std::vector<double> vals_;
};

}  // namespace detail

/// F*(x, z) = sup_xi (xi . z - F(x, xi)), as a callable handle.
///
/// Three backings: closed-form/root-find evaluation for the zoo (analytic),
/// an exact transform of the sampled radial profile, and brute force over a
/// lattice of the gradient ball. The grid backings are built at one point x
/// and refuse evaluation anywhere else.
class ConjugateHandle {
 public:
  ConjugateHandle(ConjugateKind kind, EnergyDensity source,
                  std::shared_ptr<const detail::ConjugateModel> model, double domain_radius,
                  std::optional<Vec2N> anchor, bool has_gradient)
      : kind_(kind),
        source_(std::move(source)),
        model_(std::move(model)),
        domain_radius_(domain_radius),
        anchor_(anchor),
        has_gradient_(has_gradient) {}

  ExtReal operator()(const Vec2N& x, const Vec2N& z) const { return eval(x, z, false).value; }

  ConjugateValue value_and_gradient(const Vec2N& x, const Vec2N& z) const {
    require_gradient();
    return eval(x, z, true);
  }

  /// (F*)'(x, z); for grid backings, a subgradient.
  Vec2N gradient(const Vec2N& x, const Vec2N& z) const { return value_and_gradient(x, z).gradient; }

  bool has_gradient() const { return has_gradient_; }
  ConjugateKind kind() const { return kind_; }
  /// F* is finite on the closed ball of this radius (+inf for the analytic
  /// zoo conjugates, which are finite everywhere).
  double domain_radius() const { return domain_radius_; }
  const EnergyDensity& source() const { return source_; }
  const std::optional<Vec2N>& anchor() const { return anchor_; }

 private:
  ConjugateValue eval(const Vec2N& x, const Vec2N& z, bool want_gradient) const {
    if (anchor_ && (x.n != anchor_->n || x[0] != (*anchor_)[0] || x[1] != (*anchor_)[1]))
      throw std::invalid_argument("conjugate handle (" + std::string(to_string(kind_)) +
                                  ") was built at x=" + to_string(*anchor_) +
                                  " and cannot be evaluated at x=" + to_string(x));
    if (!z.finite()) throw ValidationError("conjugate: non-finite argument");
    return model_->eval(x, z, want_gradient);
  }

  void require_gradient() const {
    if (!has_gradient_)
      throw std::logic_error("conjugate handle (" + std::string(to_string(kind_)) +
                             ") has no gradient");
  }

  ConjugateKind kind_;
  EnergyDensity source_;
  std::shared_ptr<const detail::ConjugateModel> model_;
  double domain_radius_;
  std::optional<Vec2N> anchor_;
  bool has_gradient_;
};

/// Conjugate of a zoo member. Radial members invert the profile slope by a
/// safeguarded scalar Newton iteration; the anisotropic member inverts F' by
/// damped Newton in R^n and evaluates z . xi* - F(x, xi*).
inline ConjugateHandle conjugate_analytic(const EnergyDensity& F) {
  return {ConjugateKind::analytic, F, std::make_shared<detail::AnalyticConjugate>(F), INFINITY,
          std::nullopt, true};
}

struct RadialGrid {
  int nodes = 4001;
  /// The sample window [-R, R] is chosen with f'(x, R) = max_slope, so the
  /// handle is finite exactly on the ball of that radius.
  double max_slope = 16.0;
};

/// Exact discrete transform of the radial profile at x; requires a radial F.
inline ConjugateHandle conjugate_radial(const EnergyDensity& F, const Vec2N& x, RadialGrid grid) {
  const RadialProfile* f = F.radial();
  if (!f) throw ValidationError("conjugate_radial: energy '" + F.name() + "' is not radial");
  if (grid.nodes < 3) throw ValidationError("conjugate_radial: need at least 3 nodes");
  if (!(grid.max_slope > f->slope_at_origin(x)))
    throw ValidationError("conjugate_radial: max_slope must exceed the slope at the origin");
  const double R = radial_inverse_slope(*f, x, grid.max_slope);
  const double reach = f->df(x, R);
  return {ConjugateKind::radial_1d_grid, F,
          std::make_shared<detail::RadialGridConjugate>(*f, x, R, grid.nodes), reach, x, true};
}

/// Brute-force conjugate at x over a lattice of the ball of radius
/// `box_radius` with `resolution` points per axis (odd values put the origin
/// on the lattice). Finite everywhere; exact for |z| small enough that the
/// maximizer stays in the ball, up to the lattice spacing.
inline ConjugateHandle conjugate_nd_bruteforce(const EnergyDensity& F, const Vec2N& x,
                                               double box_radius, int resolution) {
  if (resolution < 64) throw ValidationError("conjugate_nd_bruteforce: resolution must be >= 64");
  if (!(box_radius > 0.0)) throw ValidationError("conjugate_nd_bruteforce: box_radius must be > 0");
  return {ConjugateKind::nd_grid, F,
          std::make_shared<detail::NdGridConjugate>(F, x, box_radius, resolution), INFINITY, x,
          true};
}

}  // namespace fenchelkit
