#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fenchelkit/core/energy.hpp"

namespace fenchelkit::testing {

/// The six zoo members with non-trivial x-dependence where the energy has a
/// coefficient. Coefficients are expressions in x1, x2 so the same set is
/// valid in 1D (x2 = 0) and 2D.
inline std::vector<EnergyDensity> zoo(int n) {
  auto expr = [n](const std::string& s) { return CoefficientField::expression(s, n); };
  return {
      make_energy("power_p", {{"p", 2.0}}),
      make_energy("double_phase", {{"p", 2.0}, {"q", 3.0}}, {{"a", expr("x1")}}),
      make_energy("exponential_coeff", {}, {{"omega", expr("1 + 0.5*x1")}}),
      make_energy("perturbed_variable_exponent", {}, {{"p", expr("1.5 + 0.5*x1")}}),
      make_energy("nearly_linear_double_phase", {{"q", 3.0}}, {{"a", expr("x1*x2 + 0.5")}}),
      make_energy("anisotropic_double_phase", {{"p", 2.0}, {"q", 4.0}}, {{"a", expr("1 + x2")}}),
  };
}

/// Uniform sampler for points in [0,1]^n and vectors in balls.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  Vec2N point(int n) {
    return n == 1 ? Vec2N(unit_(rng_)) : Vec2N(unit_(rng_), unit_(rng_));
  }
  Vec2N in_ball(int n, double r) {
    if (n == 1) return Vec2N(r * (2 * unit_(rng_) - 1));
    const double rho = r * std::sqrt(unit_(rng_));
    return rho * Vec2N::direction(2, 2 * std::numbers::pi * unit_(rng_));
  }
  Vec2N with_norm(int n, double rho) {
    if (n == 1) return Vec2N(unit_(rng_) < 0.5 ? -rho : rho);
    return rho * Vec2N::direction(2, 2 * std::numbers::pi * unit_(rng_));
  }
  double uniform(double a, double b) { return a + (b - a) * unit_(rng_); }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

inline double scale(double a, double b) { return 1.0 + std::max(std::abs(a), std::abs(b)); }

}  // namespace fenchelkit::testing
