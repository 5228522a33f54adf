#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fenchelkit/core/halton.hpp"
#include "fenchelkit/core/probes.hpp"
#include "fenchelkit/core/report.hpp"
#include "fenchelkit/extension/appendix_maps.hpp"
#include "fenchelkit/legendre/conjugate.hpp"
#include "fenchelkit/legendre/restricted.hpp"

namespace fenchelkit {

struct ExtensionSampleSpec {
  int n = 2;
  std::size_t lipschitz_pairs = 10000;
  std::size_t points = 1000;       // (x, xi) samples for the pointwise checks
  std::size_t inverse_points = 300;  // samples for the inverse-map cross-check
  std::size_t exhaustion_points = 100;
  bool injectivity = true;
  RadialSolve method = RadialSolve::golden_section;
};

namespace detail {

/// Low-discrepancy (x, xi) with |xi| <= radius; stream selects an
/// independent slice of the sequence.
inline std::pair<Vec2N, Vec2N> extension_sample(int n, std::uint64_t i, double radius,
                                                std::uint64_t stream) {
  const std::uint64_t j = i + 100003 * stream;
  if (n == 1)
    return {Vec2N(Halton::coord(j, 0)), Vec2N(radius * (2 * Halton::coord(j, 1) - 1))};
  const double rho = radius * std::sqrt(Halton::coord(j, 2));
  return {Vec2N(Halton::coord(j, 0), Halton::coord(j, 1)),
          rho * Vec2N::direction(2, 2 * std::numbers::pi * Halton::coord(j, 3))};
}

/// Largest |(F*)'(z)| over |z| = k on a few directions, i.e. the radius of
/// the coincidence region (F')^{-1}(B_k) at x.
inline double coincidence_reach(const EnergyDensity& F, const Vec2N& x, double k) {
  double reach = 0.0;
  for (const Vec2N& d : sphere_directions(x.n, 16)) reach = std::max(reach, norm(conj_grad(F, x, k * d)));
  return reach;
}

/// Rescales a sample of the ball B_cap into the ball of twice the
/// coincidence radius (capped at cap), so both regimes of F_k get samples.
inline Vec2N into_coincidence_scale(const EnergyDensity& F, const Vec2N& x, double k, double cap,
                                    const Vec2N& xi) {
  const double reach = coincidence_reach(F, x, k);
  if (reach <= 0.0) return xi;
  return (std::min(2.0 * reach, cap) / cap) * xi;
}

}  // namespace detail

/// One-pass certificate of the C^1 extension F_k: Lipschitz constant k,
/// coincidence with F on (F')^{-1}(B_k), the sandwich bounds, H against
/// finite differences of F_k, H against the inverse-map construction,
/// continuity of H across the gluing sphere, monotone exhaustion F_k -> F,
/// injectivity of G, and the derivative of F itself.
inline Report extension_certificate(const EnergyDensity& F, double k, ExtensionSampleSpec spec = {}) {
  Report rep;
  rep.name = "extension";
  const int n = spec.n;
  const auto conj = conjugate_analytic(F);
  const RestrictedConjugate Rk(F, conj, k, spec.method);
  const bool kinked = !F.flags().smooth_at_origin;
  const double cap = 4.0 * k;

  CheckResult& density = rep.add("density_derivative");
  CheckResult& lipschitz = rep.add("lipschitz");
  CheckResult& coincide_value = rep.add("coincidence_value");
  CheckResult& coincide_deriv = rep.add("coincidence_derivative");
  CheckResult& sandwich = rep.add("sandwich");
  CheckResult& deriv_bound = rep.add("derivative_bound");
  CheckResult& fd = rep.add("derivative_consistency");
  CheckResult& cross = rep.add("h_cross_validation");
  CheckResult& gluing = rep.add("gluing_continuity");
  CheckResult& exhaustion = rep.add("monotone_exhaustion");

  const auto where = [](const Vec2N& x, const Vec2N& xi) {
    return "x=" + to_string(x) + " xi=" + to_string(xi);
  };

  // sandwich constants: sampled M_{F*}(1), M_{F*}(k); pointwise terms are added per sample
  const auto dirs = detail::sphere_directions(n, 16);
  const auto xs = domain_samples(n, 64);
  double M1 = 0.0, Mk = 0.0;
  for (const Vec2N& x : xs)
    for (const Vec2N& d : dirs) {
      M1 = std::max(M1, conj(x, d).value());
      Mk = std::max(Mk, conj(x, k * d).value());
    }

  for (std::uint64_t i = 0; i < spec.points; ++i) {
    // alternate between the box |xi| <= 4k and twice the coincidence region
    auto [x, xi] = detail::extension_sample(n, i, cap, 0);
    if (i % 2 == 1) xi = detail::into_coincidence_scale(F, x, k, cap, xi);
    const double t = norm(xi);
    const auto v = Rk.evaluate(x, xi);
    const Vec2N g = F.derivative(x, xi);
    const double Fx = F(x, xi);

    if (!(kinked && t < 1e-3) && t > 0.0) {
      const double step = 1e-6 * (1 + t);
      double err = 0.0;
      for (int a = 0; a < n; ++a) {
        const Vec2N e = step * Vec2N::unit(n, a);
        const double fdv = (F(x, xi + e) - F(x, xi - e)) / (2 * step);
        err = std::max(err, std::abs(fdv - g[a]) / (1 + std::abs(fdv)));
      }
      density.record(1e-5 - err, where(x, xi));
    }

    if (norm(g) <= k * (1 - 1e-6)) {
      coincide_value.record(1e-8 * (1 + std::max(v.value, Fx)) - std::abs(v.value - Fx), where(x, xi));
      coincide_deriv.record(1e-6 - norm(v.derivative - g), where(x, xi));
    }

    if (t > 0.0) {
      const Vec2N u = xi / t;
      const double m1 = std::max(M1, conj(x, u).value());
      const double mk = std::max(Mk, conj(x, k * u).value());
      double lower = std::max(k * t - mk, 0.0);
      if (k >= 1.0) lower = std::max(lower, t - m1);
      const double upper = std::min(k * t, Fx);
      const double tol = 1e-9 * (1 + std::max(std::abs(lower), std::abs(upper)));
      sandwich.record(std::min(v.value - lower, upper - v.value) + tol, where(x, xi));
    }
    deriv_bound.record(k * (1 + 1e-12) - norm(v.derivative), where(x, xi));

    // finite differences of F_k, away from the gluing sphere and (for
    // energies with a corner) from the origin
    if (t > 0.0 && !(kinked && t < 1e-3)) {
      const double d = 1e-5 * (1 + t);
      bool straddles = false;
      for (int a = 0; a < n && !straddles; ++a) {
        const Vec2N e = d * Vec2N::unit(n, a);
        const double lo = norm(F.derivative(x, xi - e)) - k, hi = norm(F.derivative(x, xi + e)) - k;
        straddles = (lo <= 0.0) != (hi <= 0.0) || std::abs(norm(g) - k) <= 1e-6 * k;
      }
      if (!straddles) {
        double err = 0.0;
        for (int a = 0; a < n; ++a) {
          const Vec2N e = d * Vec2N::unit(n, a);
          const double fdv = (Rk(x, xi + e) - Rk(x, xi - e)) / (2 * d);
          err = std::max(err, std::abs(fdv - v.derivative[a]) / (1 + std::abs(fdv)));
        }
        fd.record(1e-5 - err, where(x, xi));
      }
    }
  }

  for (std::uint64_t i = 0; i < spec.lipschitz_pairs; ++i) {
    const auto [x, xi] = detail::extension_sample(n, i, cap, 1);
    Vec2N zeta = detail::extension_sample(n, i, cap, 2).second;
    if (i % 2 == 1) zeta = xi + (1e-3 / cap) * zeta;  // close pairs
    const double a = Rk(x, xi), b = Rk(x, zeta);
    const double bound = k * norm(xi - zeta) * (1 + 1e-10) + 1e-13 * (1 + std::max(a, b));
    lipschitz.record(bound - std::abs(a - b), where(x, xi) + " zeta=" + to_string(zeta));
  }

  for (std::uint64_t i = 0; i < spec.inverse_points; ++i) {
    auto [x, xi] = detail::extension_sample(n, i, cap, 3);
    if (i % 2 == 1) xi = detail::into_coincidence_scale(F, x, k, cap, xi);
    if (norm(xi) == 0.0) continue;
    try {
      const AppendixMaps maps(F, x, k);
      const Vec2N h = h_via_inverse_map(maps, xi);
      cross.record(1e-6 * k - norm(h - Rk.derivative(x, xi)), where(x, xi));
    } catch (const std::exception& e) {
      cross.error(where(x, xi) + ": " + e.what());
    }
  }

  // two-sided limits of H at the gluing sphere |F'| = k
  if (const RadialProfile* f = F.radial()) {
    for (const Vec2N& x : domain_samples(n, 5)) {
      const double tk = radial_inverse_slope(*f, x, k);
      if (tk <= 0.0) continue;
      const AppendixMaps maps(F, x, k);
      for (const Vec2N& d : detail::sphere_directions(n, 8)) {
        const Vec2N in = h_via_inverse_map(maps, tk * (1 - 1e-9) * d);
        const Vec2N out = h_via_inverse_map(maps, tk * (1 + 1e-9) * d);
        gluing.record(1e-6 - norm(in - out), where(x, tk * d));
      }
    }
  } else {
    rep.notes.push_back("gluing_continuity: two-sided probe needs a radial energy; skipped");
  }

  for (std::uint64_t i = 0; i < spec.exhaustion_points; ++i) {
    const auto [x, xi] = detail::extension_sample(n, i, 2.0, 4);
    const double Fx = F(x, xi);
    const double slope = norm(F.derivative(x, xi));
    double prev = -INFINITY;
    double kk = k;
    for (int j = 0; j < 40; ++j, kk *= 2.0) {
      const double v = RestrictedConjugate(F, conj, kk, spec.method)(x, xi);
      if (std::isfinite(prev))
        exhaustion.record(v - prev + 1e-10 * (1 + std::abs(v)), where(x, xi) + " k=" + std::to_string(kk));
      prev = v;
      if (kk >= slope) {
        exhaustion.record(1e-8 * (1 + Fx) - std::abs(v - Fx), where(x, xi) + " limit");
        break;
      }
    }
  }

  if (spec.injectivity) {
    const AppendixMaps maps(F, domain_samples(n, 5).back(), k);
    rep.checks.push_back(g_injectivity_probe(maps));
  }

  if (F.name() == "power_p" && F.params().count("p") && F.params().at("p") == 2.0) {
    CheckResult& huber = rep.add("huber_closed_form");
    for (std::uint64_t i = 0; i < 200; ++i) {
      const auto [x, xi] = detail::extension_sample(n, i, cap, 5);
      const double t = norm(xi);
      const double closed = t <= k ? 0.5 * t * t : k * t - 0.5 * k * k;
      huber.record(1e-8 * (1 + closed) - std::abs(Rk(x, xi) - closed), where(x, xi));
    }
  }
  if (kinked) rep.notes.push_back("energy has a corner at the origin: derivative checks skip |xi| < 1e-3");
  rep.notes.push_back("sampled certificate: no counterexample among " + std::to_string(spec.points) +
                      " points and " + std::to_string(spec.lipschitz_pairs) + " pairs");
  return rep;
}

}  // namespace fenchelkit
