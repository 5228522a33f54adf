#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fenchelkit/core/halton.hpp"
#include "fenchelkit/core/probes.hpp"
#include "fenchelkit/core/report.hpp"
#include "fenchelkit/legendre/conjugate.hpp"
#include "fenchelkit/legendre/restricted.hpp"

namespace fenchelkit {

namespace detail {

/// F_k tabulated on the lattice points of [-R, R]^n that lie in B_R.
struct FkLattice {
  std::vector<Vec2N> pts;
  std::vector<double> vals;
  double spacing = 0.0;

  FkLattice(const LocalRestricted& fk, int n, double R, int res) {
    spacing = 2.0 * R / (res - 1);
    for (int i = 0; i < res; ++i) {
      const double a = -R + spacing * i;
      if (n == 1) {
        add(fk, Vec2N(a));
        continue;
      }
      for (int j = 0; j < res; ++j) {
        const Vec2N xi(a, -R + spacing * j);
        if (norm(xi) <= R * (1 + 1e-12)) add(fk, xi);
      }
    }
  }

  void add(const LocalRestricted& fk, const Vec2N& xi) {
    pts.push_back(xi);
    vals.push_back(fk.value(xi));
  }

  /// sup over the lattice of xi . z - F_k(xi), with the maximizing point
  std::pair<double, Vec2N> sup(const Vec2N& z) const {
    double best = -INFINITY;
    Vec2N arg = pts.front();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double v = dot(pts[i], z) - vals[i];
      if (v > best) {
        best = v;
        arg = pts[i];
      }
    }
    return {best, arg};
  }
};

/// Refines a lattice sup of the concave function xi . z - F_k(xi) by local
/// lattices of 17^n points around the current maximizer, each 4x finer.
inline std::pair<double, double> zoom_sup(const LocalRestricted& fk, const Vec2N& z, double best,
                                          Vec2N arg, double h, double R, int levels) {
  const int n = z.n;
  for (int level = 0; level < levels; ++level) {
    const double fine = h / 4.0;
    const Vec2N centre = arg;
    for (int i = -8; i <= 8; ++i) {
      for (int j = (n == 1 ? 0 : -8); j <= (n == 1 ? 0 : 8); ++j) {
        const Vec2N xi = n == 1 ? Vec2N(centre[0] + i * fine) : Vec2N(centre[0] + i * fine, centre[1] + j * fine);
        if (norm(xi) > R) continue;
        const double v = dot(xi, z) - fk.value(xi);
        if (v > best) {
          best = v;
          arg = xi;
        }
      }
    }
    h = fine;
  }
  return {best, h};
}

inline Vec2N ball_sample(int n, std::uint64_t i, double radius) {
  if (n == 1) return Vec2N(radius * (2.0 * Halton::coord(i, 0) - 1.0));
  const double rho = radius * std::sqrt(Halton::coord(i, 0));
  return rho * Vec2N::direction(2, 2.0 * std::numbers::pi * Halton::coord(i, 1));
}

/// The points x a certificate visits: the handle's anchor if it has one.
inline std::vector<Vec2N> certificate_points(const ConjugateHandle& conj, int n, std::size_t count) {
  if (conj.anchor()) return {*conj.anchor()};
  return domain_samples(n, count);
}

}  // namespace detail

struct FkStarOptions {
  int n = 2;
  std::size_t points = 2;  // sample points x in the domain
  int resolution = 129;    // lattice points per axis (odd keeps 0 on the lattice)
  int outer_resolution = 65;
  int zoom_levels = 2;
  double delta = 1e-6;  // relative margin from the sphere |z| = k
};

/// Conjugates F_k by brute force and compares with F*: equal (to lattice
/// accuracy) inside B_{k(1-delta)}; outside B_k the lattice sup over growing
/// balls B_R must exceed a threshold linear in R.
inline Report fk_star_certificate(const RestrictedConjugate& Rk, std::size_t samples,
                                  FkStarOptions opt = {}) {
  Report rep;
  rep.name = "fk_star";
  const double k = Rk.k();
  const EnergyDensity& F = Rk.energy();
  const ConjugateHandle& conj = Rk.conjugate();
  const int n = conj.anchor() ? conj.anchor()->n : opt.n;
  CheckResult& zero = rep.add("fk_star_at_zero");
  CheckResult& inside = rep.add("fk_star_equals_conjugate_inside");
  CheckResult& outside = rep.add("fk_star_diverges_outside");
  CheckResult& growth = rep.add("fk_star_grows_with_box");
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  for (const Vec2N& x : detail::certificate_points(conj, n, opt.points)) {
    const LocalRestricted fk = Rk.bind(x);
    const std::string at = "x=" + to_string(x);

    // the maximizers for |z| <= k are (F*)'(z); size the box to hold them
    double reach = 0.0;
    for (const Vec2N& d : detail::sphere_directions(n, 16))
      reach = std::max(reach, norm(conj_grad(F, x, k * d)));
    const double R_in = std::max(1.25 * reach, 0.25);
    const detail::FkLattice inner(fk, n, R_in, opt.resolution);

    const double at0 = inner.sup(Vec2N::zero(n)).first;
    zero.record(1e-12 - std::abs(at0), at);

    const std::size_t count = std::max<std::size_t>(samples, 1);
    for (std::uint64_t i = 0; i < count; ++i) {
      const Vec2N z = i == 0 ? k * 0.5 * Vec2N::unit(n, 0)
                             : detail::ball_sample(n, i, k * (1 - opt.delta));
      auto [best, arg] = inner.sup(z);
      const auto [refined, h] = detail::zoom_sup(fk, z, best, arg, inner.spacing, R_in, opt.zoom_levels);
      const double exact = conj(x, z).value();
      const double scale = 1 + std::max(std::abs(exact), std::abs(refined));
      const double lattice_tol = (norm(z) + k) * h * sqrt_n / 2 + 1e-9 * scale;
      // the lattice sup is a lower bound, up to the accuracy of F_k itself
      const double m1 = exact + 1e-8 * scale - refined;
      const double m2 = refined - (exact - lattice_tol);
      inside.record(std::min(m1, m2), at + " z=" + to_string(z));
    }

    // outside the ball: |z| in [1.5k, 2k]
    const std::size_t n_out = std::max<std::size_t>(count / 4, 4);
    const double R0 = std::max(R_in, 1.0);
    std::vector<detail::FkLattice> boxes;
    for (double mult : {1.0, 2.0, 4.0}) boxes.emplace_back(fk, n, mult * R0, opt.outer_resolution);
    for (std::uint64_t i = 0; i < n_out; ++i) {
      const double mag = k * (i == 0 ? 2.0 : 1.5 + 0.5 * Halton::coord(i, 2));
      const Vec2N z = i == 0 ? mag * Vec2N::unit(n, 0)
                             : mag * Vec2N::direction(n, 2 * std::numbers::pi * Halton::coord(i, 1) - std::numbers::pi);
      double prev = -INFINITY;
      double mult = 1.0;
      for (const auto& box : boxes) {
        const double v = box.sup(z).first;
        const double R = mult * R0;
        const double threshold = (mag - k) * R - (mag + k) * box.spacing * sqrt_n;
        outside.record(v - threshold, at + " z=" + to_string(z) + " R=" + std::to_string(R));
        if (std::isfinite(prev)) growth.record(v - prev, at + " z=" + to_string(z));
        prev = v;
        mult *= 2.0;
      }
    }
  }
  rep.notes.push_back("sampled certificate: no counterexample at lattice resolution " +
                      std::to_string(opt.resolution));
  return rep;
}

struct DualProbeOptions {
  int n = 2;
  std::size_t points = 9;
  std::size_t bound_samples = 2000;  // samples for the estimate of M_F(r)
};

/// Both directions of the superlinear / locally bounded duality:
///  (a) F*(x, z) >= r |z| - M_F(r) for each r in `radii`;
///  (b) with r_x the radius beyond which F(x, xi) >= k |xi|, the conjugate
///      stays below k r_x on the sphere |z| = k, for each k in `radii`.
inline Report superlinear_dual_probe(const EnergyDensity& F, const ConjugateHandle& conj,
                                     const std::vector<double>& radii, DualProbeOptions opt = {}) {
  Report rep;
  rep.name = "superlinear_dual";
  const int n = conj.anchor() ? conj.anchor()->n : opt.n;
  const auto points = detail::certificate_points(conj, n, opt.points);
  const auto dirs = detail::sphere_directions(n, 16);
  CheckResult& lower = rep.add("conjugate_lower_bound");
  CheckResult& upper = rep.add("conjugate_local_bound");

  for (double r : radii) {
    const double MF = local_bound_MF(F, n, r, opt.bound_samples);
    for (const Vec2N& x : points) {
      for (double mag : {0.0, 0.5 * r, r, 3.0, 2.0 * r, 4.0 * r}) {
        if (mag > conj.domain_radius()) continue;
        for (const Vec2N& d : dirs) {
          const Vec2N z = mag * d;
          const ExtReal c = conj(x, z);
          if (c.is_infinite()) {
            lower.record(INFINITY);
            continue;
          }
          const double M = std::max(MF, F(x, r * d));
          const double bound = r * mag - M;
          lower.record(c.value() - bound + 1e-9 * (1 + std::abs(bound)),
                       "x=" + to_string(x) + " z=" + to_string(z) + " r=" + std::to_string(r));
          if (mag == 0.0) break;
        }
      }
    }
  }

  for (double k : radii) {
    if (k > conj.domain_radius()) {
      rep.notes.push_back("k=" + std::to_string(k) + " skipped: beyond the conjugate's domain");
      continue;
    }
    // directions are sampled, so non-radial energies need a safety factor
    const double target = F.radial() ? k : 1.05 * k;
    const auto fine_dirs = detail::sphere_directions(n, 64);
    for (const Vec2N& x : points) {
      auto ratio = [&](double t) {
        double m = INFINITY;
        for (const Vec2N& d : fine_dirs) m = std::min(m, F(x, t * d) / t);
        return m;
      };
      double hi = 1e-6;
      while (ratio(hi) < target) hi *= 2.0;
      double lo = hi / 2.0;
      if (hi > 1e-6) {
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (ratio(mid) < target ? lo : hi) = mid;
        }
      }
      double Mstar = 0.0;
      for (const Vec2N& d : fine_dirs) Mstar = std::max(Mstar, conj(x, k * d).value());
      const double bound = k * hi;
      upper.record(bound * (1 + 1e-9) + 1e-12 - Mstar,
                   "x=" + to_string(x) + " k=" + std::to_string(k));
    }
  }
  rep.notes.push_back("sampled certificate: " + std::to_string(points.size()) +
                      " points of the domain");
  return rep;
}

}  // namespace fenchelkit
