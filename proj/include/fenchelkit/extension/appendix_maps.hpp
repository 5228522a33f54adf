#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fenchelkit/core/energy.hpp"
#include "fenchelkit/core/errors.hpp"
#include "fenchelkit/core/report.hpp"
#include "fenchelkit/extension/inverse_gradient.hpp"

namespace fenchelkit {

/// The maps behind the geometric description of F_k' at a fixed x:
///
///   G(z, r) = (F*)'(r z)            for 0 < r < 1
///   G(z, r) = (r - 1) z + (F*)'(z)  for r >= 1
///   P(z, s) = s z  (s < 1),  z  (s >= 1)
///
/// with z on the sphere |z| = k. G sweeps the whole gradient space once, and
/// F_k' = P o G^{-1}.
class AppendixMaps {
 public:
  AppendixMaps(EnergyDensity F, Vec2N x, double k) : F_(std::move(F)), x_(x), k_(k) {
    if (!(k_ > 0.0) || !std::isfinite(k_)) throw ValidationError("AppendixMaps: k must be positive");
  }

  double k() const { return k_; }
  const Vec2N& x() const { return x_; }
  const EnergyDensity& energy() const { return F_; }
  int dim() const { return x_.n; }

  Vec2N conj_grad(const Vec2N& z) const { return fenchelkit::conj_grad(F_, x_, z); }

  Vec2N G(const Vec2N& z, double r) const {
    require_sphere(z);
    if (!(r > 0.0)) throw ValidationError("AppendixMaps::G: r must be positive");
    if (r < 1.0) return conj_grad(r * z);
    return (r - 1.0) * z + conj_grad(z);
  }

  Vec2N P(const Vec2N& z, double s) const {
    require_sphere(z);
    if (!(s > 0.0)) throw ValidationError("AppendixMaps::P: s must be positive");
    return s < 1.0 ? s * z : z;
  }

  /// The sphere point at angle theta (2D) or sign(theta) (1D).
  Vec2N sphere(double theta) const { return k_ * Vec2N::direction(dim(), theta); }

 private:
  void require_sphere(const Vec2N& z) const {
    if (std::abs(norm(z) - k_) > 1e-9 * k_)
      throw ValidationError("AppendixMaps: z must lie on the sphere |z| = k, got |z|=" +
                            std::to_string(norm(z)));
  }

  EnergyDensity F_;
  Vec2N x_;
  double k_;
};

struct InverseMapResult {
  Vec2N z;          // point of the sphere |z| = k
  double r = 0.0;   // radial parameter, G(z, r) = xi
  double residual = 0.0;
};

namespace detail {

/// r > 0 with G(z, r) . u = target, where u is a unit vector with
/// G(z, .) . u increasing; bisection after bracketing.
inline double solve_radial_parameter(const AppendixMaps& m, const Vec2N& z, const Vec2N& u,
                                     double target) {
  auto phi = [&](double r) { return dot(m.G(z, r), u) - target; };
  double lo = 0.0, hi = 1.0;
  while (phi(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw ConvergenceError("inverse map: cannot bracket r");
  }
  for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    (phi(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::max(hi, 1e-300);
}

}  // namespace detail

/// Solves G(z, r) = xi for (z, r) in the sphere x (0, inf).
///
/// 1D: z = k sign(xi) and r by bisection. 2D: the sphere is parameterized
/// by the angle theta; the start is theta = arg(xi) with r from bisection
/// along xi, followed by damped Newton in (theta, log r) with a
/// finite-difference Jacobian.
inline InverseMapResult invert_G(const AppendixMaps& m, const Vec2N& xi) {
  const double len = norm(xi);
  if (!(len > 0.0)) throw ValidationError("invert_G: xi must be nonzero");
  const Vec2N u = xi / len;
  if (m.dim() == 1) {
    const Vec2N z = m.k() * u;
    const double r = detail::solve_radial_parameter(m, z, u, len);
    return {z, r, norm(m.G(z, r) - xi)};
  }
  double theta = std::atan2(xi[1], xi[0]);
  double rho = std::log(detail::solve_radial_parameter(m, m.sphere(theta), u, len));
  auto residual = [&](double th, double lr) { return m.G(m.sphere(th), std::exp(lr)) - xi; };
  Vec2N res = residual(theta, rho);
  double rn = norm(res);
  const double target = 1e-13 * (1 + len);
  for (int it = 0; it < 60 && rn > target; ++it) {
    const double e = 1e-7;
    const Vec2N dth = (residual(theta + e, rho) - residual(theta - e, rho)) / (2 * e);
    const Vec2N drho = (residual(theta, rho + e) - residual(theta, rho - e)) / (2 * e);
    const double det = dth[0] * drho[1] - dth[1] * drho[0];
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) break;
    // Newton step for [dth drho] (a, b)^T = -res
    const double a = (-res[0] * drho[1] + res[1] * drho[0]) / det;
    const double b = (-dth[0] * res[1] + dth[1] * res[0]) / det;
    double step = 1.0;
    bool moved = false;
    while (step > 1e-12) {
      const Vec2N trial = residual(theta + step * a, rho + step * b);
      if (norm(trial) < rn) {
        theta += step * a;
        rho += step * b;
        res = trial;
        rn = norm(trial);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  if (!(rn <= 1e-9 * (1 + len)))
    throw ConvergenceError("invert_G: residual " + std::to_string(rn) + " at xi=" + to_string(xi));
  return {m.sphere(theta), std::exp(rho), rn};
}

/// H(xi) = P(G^{-1}(xi)); near the origin H = F' (|xi| < 1e-8).
inline Vec2N h_via_inverse_map(const AppendixMaps& m, const Vec2N& xi) {
  if (norm(xi) < 1e-8) return m.energy().derivative(m.x(), xi);
  const InverseMapResult inv = invert_G(m, xi);
  return m.P(inv.z, inv.r);
}

struct InjectivityOptions {
  int angles = 100;
  int radii = 100;
  double r_span = 4.0;
  double min_distance = 1e-9;
};

/// Samples G on (sphere) x (r_lo, r_lo + r_span] and reports the smallest
/// image distance between distinct inputs. r_lo is the radius below which
/// (F*)'(r z) vanishes identically for energies with a corner at 0 (slope
/// s0 at the origin), where G is constant and the injection claim does not
/// apply.
inline CheckResult g_injectivity_probe(const AppendixMaps& m, InjectivityOptions opt = {}) {
  CheckResult res("g_injectivity");
  double r_lo = 0.0;
  if (const RadialProfile* f = m.energy().radial()) r_lo = f->slope_at_origin(m.x()) / m.k();
  const int n_angles = m.dim() == 1 ? 2 : opt.angles;
  std::vector<Vec2N> img;
  img.reserve(static_cast<std::size_t>(n_angles * opt.radii));
  for (int a = 0; a < n_angles; ++a) {
    const double theta = m.dim() == 1 ? (a == 0 ? 1.0 : -1.0) : 2.0 * std::numbers::pi * a / n_angles;
    const Vec2N z = m.sphere(theta);
    for (int j = 1; j <= opt.radii; ++j) img.push_back(m.G(z, r_lo + opt.r_span * j / opt.radii));
  }
  // sort by first coordinate so only nearby candidates are compared
  std::vector<std::size_t> order(img.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return img[a][0] < img[b][0]; });
  double best = INFINITY;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (img[order[j]][0] - img[order[i]][0] >= best) break;
      best = std::min(best, norm(img[order[j]] - img[order[i]]));
    }
  }
  res.samples = img.size();
  res.worst_margin = best - opt.min_distance;
  if (best <= opt.min_distance)
    res.fail("two sampled inputs map within " + std::to_string(best));
  return res;
}

}  // namespace fenchelkit
