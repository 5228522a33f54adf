#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "fenchelkit/core/energy.hpp"
#include "fenchelkit/core/halton.hpp"

namespace fenchelkit {

/// Deterministic sample points of the unit domain [0,1]^n: the 2^n corners
/// and the centre first, then a Halton sequence.
inline std::vector<Vec2N> domain_samples(int n, std::size_t count) {
  std::vector<Vec2N> pts;
  if (n == 1) {
    pts = {Vec2N(0.0), Vec2N(1.0), Vec2N(0.5)};
  } else {
    pts = {Vec2N(0, 0), Vec2N(1, 0), Vec2N(0, 1), Vec2N(1, 1), Vec2N(0.5, 0.5)};
  }
  for (std::uint64_t i = 0; pts.size() < count; ++i)
    pts.push_back(n == 1 ? Vec2N(Halton::coord(i, 0))
                         : Vec2N(Halton::coord(i, 0), Halton::coord(i, 1)));
  pts.resize(std::min(pts.size(), std::max<std::size_t>(count, 1)));
  return pts;
}

namespace detail {

/// Point `i` of a low-discrepancy sample of Omega x S_r (the sphere of
/// radius r). In 1D the sphere is {-r, r}.
inline std::pair<Vec2N, Vec2N> domain_sphere_sample(int n, std::uint64_t i, double r) {
  if (n == 1) {
    const Vec2N x(Halton::coord(i, 0));
    return {x, Vec2N(i % 2 == 0 ? r : -r)};
  }
  const Vec2N x(Halton::coord(i, 0), Halton::coord(i, 1));
  const double theta = 2.0 * std::numbers::pi * Halton::coord(i, 2);
  return {x, r * Vec2N::direction(2, theta)};
}

/// Directions on the unit sphere used for pointwise-in-x sphere scans; the
/// coordinate axes are always included.
inline std::vector<Vec2N> sphere_directions(int n, int count) {
  if (n == 1) return {Vec2N(1.0), Vec2N(-1.0)};
  std::vector<Vec2N> d;
  for (int i = 0; i < count; ++i)
    d.push_back(Vec2N::direction(2, 2.0 * std::numbers::pi * i / count));
  return d;
}

}  // namespace detail

/// Estimate of M_F(r) = sup_{x in Omega, xi in B_r} F(x, xi).
///
/// F(x, .) is convex with F(x, 0) = 0, so the supremum over the ball is
/// reached on its boundary sphere; samples are drawn from Omega x S_r.
/// The result is nondecreasing in r for a fixed sample count.
inline double local_bound_MF(const EnergyDensity& F, int n, double r, std::size_t samples) {
  double best = 0.0;
  const auto corners = domain_samples(n, n == 1 ? 3 : 5);
  const auto dirs = detail::sphere_directions(n, 8);
  for (const Vec2N& x : corners)
    for (const Vec2N& d : dirs) best = std::max(best, F(x, r * d));
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto [x, xi] = detail::domain_sphere_sample(n, i, r);
    best = std::max(best, F(x, xi));
  }
  return best;
}

/// Estimate of inf_{x in Omega, |xi| = r} F(x, xi) / |xi|.
inline double superlinearity_ratio(const EnergyDensity& F, int n, double r, std::size_t samples) {
  double best = INFINITY;
  const auto corners = domain_samples(n, n == 1 ? 3 : 5);
  const auto dirs = detail::sphere_directions(n, 8);
  for (const Vec2N& x : corners)
    for (const Vec2N& d : dirs) best = std::min(best, F(x, r * d) / r);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto [x, xi] = detail::domain_sphere_sample(n, i, r);
    best = std::min(best, F(x, xi) / r);
  }
  return best;
}

struct DerivativeBoundResult {
  bool ok = true;
  double worst_ratio = 0.0;  // max |F'| / M_F(|xi| + 1) over the sample
};

/// Checks |F'(x, xi)| <= M_F(|xi| + 1) on a low-discrepancy sample of
/// Omega x B_r. The bound is taken pointwise in x (sup of F(x, .) over the
/// sphere of radius |xi| + 1 at the same x), which implies the uniform one.
inline DerivativeBoundResult derivative_bound_details(const EnergyDensity& F, int n, double r,
                                                      std::size_t samples, double tol = 1e-9) {
  DerivativeBoundResult res;
  const auto dirs = detail::sphere_directions(n, 64);
  for (std::uint64_t i = 0; i < samples; ++i) {
    Vec2N x, xi;
    if (n == 1) {
      x = Vec2N(Halton::coord(i, 0));
      xi = Vec2N(r * (2.0 * Halton::coord(i, 1) - 1.0));
    } else {
      x = Vec2N(Halton::coord(i, 0), Halton::coord(i, 1));
      const double rho = r * std::sqrt(Halton::coord(i, 2));
      xi = rho * Vec2N::direction(2, 2.0 * std::numbers::pi * Halton::coord(i, 3));
    }
    const double grad = norm(F.derivative(x, xi));
    const double radius = norm(xi) + 1.0;
    double bound = 0.0;
    for (const Vec2N& d : dirs) bound = std::max(bound, F(x, radius * d));
    res.worst_ratio = std::max(res.worst_ratio, grad / bound);
    if (grad > bound * (1.0 + tol)) res.ok = false;
  }
  return res;
}

inline bool derivative_bound_check(const EnergyDensity& F, int n, double r, std::size_t samples) {
  return derivative_bound_details(F, n, r, samples).ok;
}

}  // namespace fenchelkit
