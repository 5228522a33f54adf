#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>

#include "fenchelkit/core/coefficient.hpp"
#include "fenchelkit/core/errors.hpp"
#include "fenchelkit/core/vec.hpp"

namespace fenchelkit {

using ParamMap = std::map<std::string, double>;
using CoefficientMap = std::map<std::string, CoefficientField>;

struct EnergyFlags {
  bool strictly_convex = true;
  bool superlinear = true;
  bool radial_in_xi = true;
  bool doubling = true;
  /// F(x, .) is differentiable at the origin with F'(x, 0) = 0. False for
  /// the members whose radial profile has a positive slope at t = 0.
  bool smooth_at_origin = true;
};

/// Polymorphic evaluation of a non-autonomous integrand F(x, xi).
class DensityModel {
 public:
  virtual ~DensityModel() = default;
  virtual double value(const Vec2N& x, const Vec2N& xi) const = 0;
  virtual Vec2N gradient(const Vec2N& x, const Vec2N& xi) const = 0;
  virtual Sym2 hessian(const Vec2N& x, const Vec2N& xi) const = 0;
};

/// F(x, xi) = f(x, |xi|) with f(x, .) convex, increasing, f(x, 0) = 0.
class RadialProfile : public DensityModel {
 public:
  virtual double f(const Vec2N& x, double t) const = 0;
  virtual double df(const Vec2N& x, double t) const = 0;
  virtual double d2f(const Vec2N& x, double t) const = 0;
  /// Right derivative f'(x, 0+); zero for energies smooth at the origin.
  virtual double slope_at_origin(const Vec2N&) const { return 0.0; }

  double value(const Vec2N& x, const Vec2N& xi) const final { return f(x, norm(xi)); }

  Vec2N gradient(const Vec2N& x, const Vec2N& xi) const final {
    const double t = norm(xi);
    if (t == 0.0) return Vec2N::zero(xi.n);
    return (df(x, t) / t) * xi;
  }

  Sym2 hessian(const Vec2N& x, const Vec2N& xi) const final {
    const double t = norm(xi);
    Sym2 h;
    h.n = xi.n;
    const double curv = d2f(x, t);
    if (xi.n == 1) {
      h.a = curv;
      return h;
    }
    if (t == 0.0) {
      h.a = h.d = curv;
      return h;
    }
    const double tang = df(x, t) / t;
    const double e0 = xi[0] / t, e1 = xi[1] / t;
    h.a = curv * e0 * e0 + tang * (1 - e0 * e0);
    h.b = (curv - tang) * e0 * e1;
    h.d = curv * e1 * e1 + tang * (1 - e1 * e1);
    return h;
  }
};

namespace zoo {

/// |xi|^p / p
class PowerP final : public RadialProfile {
 public:
  explicit PowerP(double p) : p_(p) {}
  double f(const Vec2N&, double t) const override { return std::pow(t, p_) / p_; }
  double df(const Vec2N&, double t) const override { return std::pow(t, p_ - 1); }
  double d2f(const Vec2N&, double t) const override { return (p_ - 1) * std::pow(t, p_ - 2); }

 private:
  double p_;
};

/// |xi|^p + a(x) |xi|^q
class DoublePhase final : public RadialProfile {
 public:
  DoublePhase(double p, double q, CoefficientField a) : p_(p), q_(q), a_(std::move(a)) {}
  double f(const Vec2N& x, double t) const override {
    return std::pow(t, p_) + a_(x) * std::pow(t, q_);
  }
  double df(const Vec2N& x, double t) const override {
    return p_ * std::pow(t, p_ - 1) + a_(x) * q_ * std::pow(t, q_ - 1);
  }
  double d2f(const Vec2N& x, double t) const override {
    return p_ * (p_ - 1) * std::pow(t, p_ - 2) + a_(x) * q_ * (q_ - 1) * std::pow(t, q_ - 2);
  }

 private:
  double p_, q_;
  CoefficientField a_;
};

/// exp(omega(x) |xi|) - 1
class ExponentialCoeff final : public RadialProfile {
 public:
  explicit ExponentialCoeff(CoefficientField omega) : omega_(std::move(omega)) {}
  double f(const Vec2N& x, double t) const override { return std::expm1(omega_(x) * t); }
  double df(const Vec2N& x, double t) const override {
    const double w = omega_(x);
    return w * std::exp(w * t);
  }
  double d2f(const Vec2N& x, double t) const override {
    const double w = omega_(x);
    return w * w * std::exp(w * t);
  }
  double slope_at_origin(const Vec2N& x) const override { return omega_(x); }

 private:
  CoefficientField omega_;
};

/// |xi|^{p(x)} log(2 + |xi|)
class PerturbedVariableExponent final : public RadialProfile {
 public:
  explicit PerturbedVariableExponent(CoefficientField p) : p_(std::move(p)) {}
  double f(const Vec2N& x, double t) const override {
    return std::pow(t, p_(x)) * std::log(2 + t);
  }
  double df(const Vec2N& x, double t) const override {
    const double p = p_(x);
    return p * std::pow(t, p - 1) * std::log(2 + t) + std::pow(t, p) / (2 + t);
  }
  double d2f(const Vec2N& x, double t) const override {
    const double p = p_(x);
    const double s = 2 + t;
    return p * (p - 1) * std::pow(t, p - 2) * std::log(s) + 2 * p * std::pow(t, p - 1) / s -
           std::pow(t, p) / (s * s);
  }
  double slope_at_origin(const Vec2N& x) const override {
    return p_(x) == 1.0 ? std::log(2.0) : 0.0;
  }

 private:
  CoefficientField p_;
};

/// |xi| log(2 + |xi|) + a(x) |xi|^q
class NearlyLinearDoublePhase final : public RadialProfile {
 public:
  NearlyLinearDoublePhase(double q, CoefficientField a) : q_(q), a_(std::move(a)) {}
  double f(const Vec2N& x, double t) const override {
    return t * std::log(2 + t) + a_(x) * std::pow(t, q_);
  }
  double df(const Vec2N& x, double t) const override {
    return std::log(2 + t) + t / (2 + t) + a_(x) * q_ * std::pow(t, q_ - 1);
  }
  double d2f(const Vec2N& x, double t) const override {
    const double s = 2 + t;
    return 1 / s + 2 / (s * s) + a_(x) * q_ * (q_ - 1) * std::pow(t, q_ - 2);
  }
  double slope_at_origin(const Vec2N&) const override { return std::log(2.0); }

 private:
  double q_;
  CoefficientField a_;
};

/// |xi|^p + a(x) |xi_1|^q. Not radial in 2D.
class AnisotropicDoublePhase final : public DensityModel {
 public:
  AnisotropicDoublePhase(double p, double q, CoefficientField a)
      : p_(p), q_(q), a_(std::move(a)) {}

  double value(const Vec2N& x, const Vec2N& xi) const override {
    return std::pow(norm(xi), p_) + a_(x) * std::pow(std::abs(xi[0]), q_);
  }
  Vec2N gradient(const Vec2N& x, const Vec2N& xi) const override {
    const double t = norm(xi);
    if (t == 0.0) return Vec2N::zero(xi.n);
    Vec2N g = (p_ * std::pow(t, p_ - 2)) * xi;
    const double s = std::abs(xi[0]);
    if (s > 0.0) g[0] += a_(x) * q_ * std::pow(s, q_ - 1) * (xi[0] > 0 ? 1.0 : -1.0);
    return g;
  }
  Sym2 hessian(const Vec2N& x, const Vec2N& xi) const override {
    Sym2 h;
    h.n = xi.n;
    const double t = std::max(norm(xi), 1e-300);
    const double radial = p_ * std::pow(t, p_ - 2);
    const double s = std::max(std::abs(xi[0]), 1e-300);
    const double aniso = a_(x) * q_ * (q_ - 1) * std::pow(s, q_ - 2);
    if (xi.n == 1) {
      h.a = radial * (p_ - 1) + aniso;
      return h;
    }
    const double e0 = xi[0] / t, e1 = xi[1] / t;
    h.a = radial * (1 + (p_ - 2) * e0 * e0) + aniso;
    h.b = radial * (p_ - 2) * e0 * e1;
    h.d = radial * (1 + (p_ - 2) * e1 * e1);
    return h;
  }

 private:
  double p_, q_;
  CoefficientField a_;
};

}  // namespace zoo

/// A non-autonomous convex energy density F(x, xi) with its derivative
/// F'(x, xi) (gradient in xi) and growth metadata. Cheap to copy; the
/// underlying model is shared and immutable.
class EnergyDensity {
 public:
  EnergyDensity(std::string name, ParamMap params, EnergyFlags flags,
                std::shared_ptr<const DensityModel> model)
      : name_(std::move(name)),
        params_(std::move(params)),
        flags_(flags),
        model_(std::move(model)),
        radial_(dynamic_cast<const RadialProfile*>(model_.get())) {
    if (!flags_.radial_in_xi) radial_ = nullptr;
  }

  double operator()(const Vec2N& x, const Vec2N& xi) const { return model_->value(x, xi); }
  double value(const Vec2N& x, const Vec2N& xi) const { return model_->value(x, xi); }

  Vec2N derivative(const Vec2N& x, const Vec2N& xi) const {
    return derivative_scale_ * model_->gradient(x, xi);
  }
  /// Derivative of the model itself, ignoring the corruption test hook. Used
  /// by the conjugate, which must not see the hook.
  Vec2N model_derivative(const Vec2N& x, const Vec2N& xi) const { return model_->gradient(x, xi); }
  Sym2 hessian(const Vec2N& x, const Vec2N& xi) const { return model_->hessian(x, xi); }

  /// Radial profile, or nullptr when F is not declared radial.
  const RadialProfile* radial() const { return radial_; }

  const std::string& name() const { return name_; }
  const ParamMap& params() const { return params_; }
  const EnergyFlags& flags() const { return flags_; }

  /// Test hook: a copy whose derivative is scaled by `factor`; every other
  /// evaluation (values, profile, conjugate) is unaffected.
  EnergyDensity with_corrupted_derivative(double factor) const {
    EnergyDensity copy = *this;
    copy.derivative_scale_ = factor;
    return copy;
  }
  bool derivative_corrupted() const { return derivative_scale_ != 1.0; }

 private:
  std::string name_;
  ParamMap params_;
  EnergyFlags flags_;
  std::shared_ptr<const DensityModel> model_;
  const RadialProfile* radial_;
  double derivative_scale_ = 1.0;
};

namespace detail {

inline double require_param(const ParamMap& params, const std::string& energy,
                            const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw ValidationError(energy + ": missing parameter '" + key + "'");
  if (!std::isfinite(it->second))
    throw ValidationError(energy + ": parameter '" + key + "' must be finite");
  return it->second;
}

/// A coefficient given either in `coeffs` or as a constant in `params`.
inline CoefficientField coefficient(const ParamMap& params, const CoefficientMap& coeffs,
                                    const std::string& key, double fallback) {
  if (auto it = coeffs.find(key); it != coeffs.end()) return it->second;
  if (auto it = params.find(key); it != params.end()) return CoefficientField::constant(it->second);
  return CoefficientField::constant(fallback);
}

inline void reject_unknown(const ParamMap& params, const CoefficientMap& coeffs,
                           const std::string& energy, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : params)
    if (!allowed.count(k)) throw ValidationError(energy + ": unknown parameter '" + k + "'");
  for (const auto& [k, v] : coeffs)
    if (!allowed.count(k)) throw ValidationError(energy + ": unknown coefficient '" + k + "'");
}

}  // namespace detail

inline const std::set<std::string>& energy_names() {
  static const std::set<std::string> names{"power_p",
                                           "double_phase",
                                           "exponential_coeff",
                                           "perturbed_variable_exponent",
                                           "nearly_linear_double_phase",
                                           "anisotropic_double_phase"};
  return names;
}

/// Builds a member of the energy zoo. Coefficients a, omega and p (for the
/// variable exponent) may be given as fields in `coeffs` or as constants in
/// `params`; a and omega default to 1 when absent.
inline EnergyDensity make_energy(const std::string& name, const ParamMap& params,
                                 const CoefficientMap& coeffs = {}) {
  using detail::coefficient;
  using detail::require_param;
  EnergyFlags flags;
  ParamMap recorded = params;
  auto record = [&](const std::string& key, const CoefficientField& c) {
    if (c.is_constant()) recorded[key] = c.lower();
  };
  auto nonneg = [&](const CoefficientField& a) {
    if (a.lower() < 0.0) throw ValidationError(name + ": coefficient a must be >= 0");
  };

  if (name == "power_p") {
    detail::reject_unknown(params, coeffs, name, {"p"});
    const double p = require_param(params, name, "p");
    if (!(p > 1.0)) throw ValidationError("power_p: requires p > 1");
    return {name, recorded, flags, std::make_shared<zoo::PowerP>(p)};
  }
  if (name == "double_phase" || name == "anisotropic_double_phase") {
    detail::reject_unknown(params, coeffs, name, {"p", "q", "a"});
    const double p = require_param(params, name, "p");
    const double q = require_param(params, name, "q");
    if (!(p > 1.0)) throw ValidationError(name + ": requires p > 1");
    if (!(q > p)) throw ValidationError(name + ": requires q > p");
    CoefficientField a = coefficient(params, coeffs, "a", 1.0);
    nonneg(a);
    record("a", a);
    if (name == "double_phase")
      return {name, recorded, flags, std::make_shared<zoo::DoublePhase>(p, q, a)};
    flags.radial_in_xi = false;
    return {name, recorded, flags, std::make_shared<zoo::AnisotropicDoublePhase>(p, q, a)};
  }
  if (name == "exponential_coeff") {
    detail::reject_unknown(params, coeffs, name, {"omega"});
    CoefficientField w = coefficient(params, coeffs, "omega", 1.0);
    if (!(w.lower() > 0.0))
      throw ValidationError("exponential_coeff: omega must be bounded away from 0");
    record("omega", w);
    flags.doubling = false;
    flags.smooth_at_origin = false;
    return {name, recorded, flags, std::make_shared<zoo::ExponentialCoeff>(w)};
  }
  if (name == "perturbed_variable_exponent") {
    detail::reject_unknown(params, coeffs, name, {"p"});
    if (!coeffs.count("p") && !params.count("p"))
      throw ValidationError(name + ": missing exponent 'p'");
    CoefficientField p = coefficient(params, coeffs, "p", 2.0);
    if (p.lower() < 1.0) throw ValidationError(name + ": requires p(x) >= 1");
    record("p", p);
    flags.smooth_at_origin = p.lower() > 1.0;
    return {name, recorded, flags, std::make_shared<zoo::PerturbedVariableExponent>(p)};
  }
  if (name == "nearly_linear_double_phase") {
    detail::reject_unknown(params, coeffs, name, {"q", "a"});
    const double q = require_param(params, name, "q");
    if (!(q > 1.0)) throw ValidationError(name + ": requires q > 1");
    CoefficientField a = coefficient(params, coeffs, "a", 1.0);
    nonneg(a);
    record("a", a);
    flags.smooth_at_origin = false;
    return {name, recorded, flags, std::make_shared<zoo::NearlyLinearDoublePhase>(q, a)};
  }
  throw ValidationError("unknown energy '" + name + "'");
}

}  // namespace fenchelkit
