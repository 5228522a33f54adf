// Acceptance suite: one block per criterion, each printing PASS or FAIL
// with the measured quantities and its runtime. Exit status is nonzero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fenchelkit/cli/config.hpp"
#include "fenchelkit/core/probes.hpp"
#include "fenchelkit/extension/appendix_maps.hpp"
#include "fenchelkit/extension/certificate.hpp"
#include "fenchelkit/legendre/certificates.hpp"
#include "fenchelkit/legendre/restricted.hpp"
#include "fenchelkit/solver/diagnostics.hpp"
#include "fenchelkit/solver/scheme.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace fk = fenchelkit;
namespace fs = std::filesystem;
using fk::Vec2N;
using fk::testing::Sampler;
using fk::testing::scale;

namespace {

const fs::path kConfigs = fs::path(FENCHELKIT_SOURCE_DIR) / "configs";

struct Outcome {
  bool passed = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    passed = passed && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fk::ProblemConfig bundled(const std::string& name) { return fk::parse_config(slurp(kConfigs / (name + ".json"))); }

// 1. Huber closed form for |xi|^2/2 at k = 1.
Outcome huber() {
  Outcome o;
  const auto F = fk::make_energy("power_p", {{"p", 2.0}});
  const fk::RestrictedConjugate Rk(F, fk::conjugate_analytic(F), 1.0);
  auto conj = [](const Vec2N& z) { return 0.5 * dot(z, z); };
  Sampler rng(1001);
  double value_err = 0.0, deriv_err = 0.0, oracle_gap = 0.0, oracle_excess = -INFINITY;
  for (int i = 0; i < 1000; ++i) {
    const Vec2N x = rng.point(2);
    const Vec2N xi = rng.in_ball(2, 4.0);
    const double t = norm(xi);
    const double closed = t <= 1.0 ? 0.5 * t * t : t - 0.5;
    const Vec2N clamped = t <= 1.0 ? xi : xi / t;
    const auto v = Rk.evaluate(x, xi);
    value_err = std::max(value_err, std::abs(v.value - closed));
    deriv_err = std::max(deriv_err, norm(v.derivative - clamped));
    if (i % 5 == 0) {
      // brute-force sup over about 10^5 points of the closed unit ball
      const double b = fk::oracle::ball_sup(conj, xi, 1.0);
      oracle_gap = std::max(oracle_gap, v.value - b);
      oracle_excess = std::max(oracle_excess, b - v.value);
    }
  }
  o.check(value_err <= 1e-8, "max |F_k - Huber| over 1000 points = " + sci(value_err) + " (<= 1e-8)");
  o.check(deriv_err <= 1e-6, "max |H - clamped identity| = " + sci(deriv_err) + " (<= 1e-6)");
  // the lattice sup is a lower bound; its deficit is bounded by the lattice spacing
  o.check(oracle_excess <= 1e-12, "ball-lattice oracle never exceeds F_k (excess " + sci(oracle_excess) + ")");
  o.check(oracle_gap <= 1e-3, "ball-lattice oracle within lattice accuracy on 200 points (gap " + sci(oracle_gap) + ")");
  return o;
}

// 2. Extension and F_k* certificates across the zoo.
Outcome certificates() {
  Outcome o;
  for (const auto& F : fk::testing::zoo(2)) {
    const auto conj = fk::conjugate_analytic(F);
    for (double k : {1.0, 4.0, 16.0}) {
      fk::ExtensionSampleSpec spec;
      spec.n = 2;
      spec.points = 500;
      spec.lipschitz_pairs = 5000;
      spec.inverse_points = 100;
      spec.exhaustion_points = 50;
      std::vector<fk::Report> reps{fk::extension_certificate(F, k, spec)};
      fk::FkStarOptions fo;
      fo.n = 2;
      reps.push_back(fk::fk_star_certificate(fk::RestrictedConjugate(F, conj, k), 16, fo));
      std::string worst, failures;
      bool ok = true;
      double margin = INFINITY;
      for (const auto& r : reps)
        for (const auto& c : r.checks) {
          if (c.samples == 0) continue;
          ok = ok && c.passed;
          if (c.worst_margin < margin) {
            margin = c.worst_margin;
            worst = c.name;
          }
          if (!c.passed) failures += " [" + c.name + ": " + (c.failures.empty() ? "" : c.failures.front()) + "]";
        }
      // when the slope at the origin reaches k, (F')^{-1}(B_k) is the origin
      // alone and the sampled coincidence check has nothing to test; check
      // F_k = F there directly
      bool coincidence = reps[0].find("coincidence_value")->samples > 0;
      if (!coincidence) {
        const fk::RestrictedConjugate Rk(F, conj, k);
        bool degenerate = F.radial() != nullptr;
        for (const Vec2N& x : fk::domain_samples(2, 64)) {
          degenerate = degenerate && F.radial()->slope_at_origin(x) >= k;
          degenerate = degenerate && Rk(x, Vec2N::zero(2)) == 0.0 && F(x, Vec2N::zero(2)) == 0.0;
        }
        coincidence = degenerate;
        if (degenerate) worst += ", coincidence region is the origin";
      }
      const bool has_all = reps[0].find("lipschitz")->samples > 0 && coincidence &&
                           reps[0].find("sandwich")->samples > 0 && reps[0].find("monotone_exhaustion")->samples > 0 &&
                           reps[1].find("fk_star_equals_conjugate_inside")->samples > 0 &&
                           reps[1].find("fk_star_diverges_outside")->samples > 0;
      o.check(ok && has_all, F.name() + " k=" + std::to_string(static_cast<int>(k)) + ": smallest margin " +
                                 sci(margin) + " (" + worst + ")" + failures);
    }
  }
  return o;
}

// 3. Fenchel identity and inequality.
Outcome fenchel() {
  Outcome o;
  for (int n : {1, 2}) {
    Sampler rng(3000 + n);
    for (const auto& F : fk::testing::zoo(n)) {
      const auto conj = fk::conjugate_analytic(F);
      double identity = 0.0, violation = -INFINITY;
      for (int i = 0; i < 1000; ++i) {
        const Vec2N x = rng.point(n);
        const Vec2N xi = rng.in_ball(n, 3.0);
        const Vec2N g = F.derivative(x, xi);
        const double lhs = conj(x, g).value() + F(x, xi), rhs = dot(xi, g);
        identity = std::max(identity, std::abs(lhs - rhs) / scale(lhs, rhs));
      }
      for (int i = 0; i < 10000; ++i) {
        const Vec2N x = rng.point(n);
        const Vec2N xi = rng.in_ball(n, 3.0);
        const Vec2N z = rng.in_ball(n, 10.0);
        const fk::ExtReal c = conj(x, z);
        if (c.is_infinite()) continue;
        const double pair = dot(xi, z), sum = F(x, xi) + c.value();
        violation = std::max(violation, (pair - sum) / scale(pair, sum));
      }
      o.check(identity <= 1e-8 && violation <= 1e-12,
              F.name() + " n=" + std::to_string(n) + ": identity residual " + sci(identity) +
                  " (<= 1e-8), worst inequality excess " + sci(violation) + " (<= 1e-12)");
    }
  }
  return o;
}

// 4. Superlinear / locally bounded duality.
Outcome duality_probes() {
  Outcome o;
  for (const auto& F : fk::testing::zoo(2)) {
    const auto conj = fk::conjugate_analytic(F);
    fk::DualProbeOptions opt;
    opt.n = 2;
    opt.points = 32;
    const auto rep = fk::superlinear_dual_probe(F, conj, {0.5, 1.0, 4.0, 16.0}, opt);
    const auto* lower = rep.find("conjugate_lower_bound");
    const auto* upper = rep.find("conjugate_local_bound");
    o.check(rep.passed() && lower->samples >= 10000,
            F.name() + ": lower bound on " + std::to_string(lower->samples) + " samples (margin " +
                sci(lower->worst_margin) + "), M_F*(k) <= k r on " + std::to_string(upper->samples) +
                " points (margin " + sci(upper->worst_margin) + ")");

    // independent random check: F*(x, z) >= r|z| - max(M, F(x, r z/|z|)) for a
    // sampled M <= M_F(r); adding F(x, r z/|z|) keeps the bound valid
    Sampler rng(4000);
    double worst = INFINITY;
    for (double r : {0.5, 1.0, 4.0}) {
      double M = 0.0;
      for (int i = 0; i < 2000; ++i) M = std::max(M, F(rng.point(2), rng.in_ball(2, r)));
      for (int i = 0; i < 3400; ++i) {
        const Vec2N x = rng.point(2);
        const Vec2N z = rng.in_ball(2, 4.0 * r);
        const double len = norm(z);
        if (len == 0.0) continue;
        const double bound = r * len - std::max(M, F(x, (r / len) * z));
        worst = std::min(worst, conj(x, z).value() - bound + 1e-9 * scale(bound, 0));
      }
    }
    o.check(worst >= 0.0, F.name() + ": independent 10^4-sample lower-bound margin " + sci(worst));
  }
  return o;
}

std::vector<double> nodal(const fk::ScalarField& u) { return {u.values().begin(), u.values().end()}; }

// 5. Quadratic 1D unconstrained solve.
Outcome quad_unconstrained() {
  Outcome o;
  const auto cfg = bundled("quad_1d_unconstrained");
  const auto P = cfg.problem();
  fk::RunOptions ro;
  ro.warm_start = fk::random_feasible(P.K, P.w0, 55);  // start away from the solution
  const auto rep = fk::run_scheme(P, cfg.schedule, ro);

  // linear-solve oracle: tridiagonal Dirichlet system with the boundary data
  const int N = cfg.N;
  const double left = P.K.boundary_values()[0], right = P.K.boundary_values()[N];
  std::vector<double> a(N - 1, -1.0), b(N - 1, 2.0), c(N - 1, -1.0), d(N - 1, 0.0);
  d.front() += left;
  d.back() += right;
  const auto inner = fk::oracle::thomas(a, b, c, d);
  const auto u = nodal(rep.u);
  double err = std::max(std::abs(u[0] - left), std::abs(u[N] - right));
  for (int i = 1; i < N; ++i) err = std::max(err, std::abs(u[i] - inner[i - 1]));
  double vi = 0.0;
  for (const auto& row : rep.vi) vi = std::max(vi, std::abs(row.m));

  o.check(rep.converged(), "scheme converged (" + rep.outer_reason + ")");
  o.check(std::abs(rep.final_energy - 0.5) <= 1e-8, "final energy " + sci(rep.final_energy) + ", |E - 0.5| = " +
                                                        sci(std::abs(rep.final_energy - 0.5)) + " (<= 1e-8)");
  o.check(err <= 1e-6, "|u - tridiagonal oracle|_inf = " + sci(err) + " (<= 1e-6)");
  o.check(!rep.vi.empty() && vi <= 1e-8,
          "max |m(eta)| over " + std::to_string(rep.vi.size()) + " test functions = " + sci(vi) + " (<= 1e-8)");
  return o;
}

// 6. Quadratic 1D obstacle solve.
Outcome quad_obstacle() {
  Outcome o;
  const auto cfg = bundled("quad_1d_obstacle");
  const auto P = cfg.problem();
  fk::RunOptions ro;
  ro.warm_start = fk::random_feasible(P.K, P.w0, 66);
  const auto rep = fk::run_scheme(P, cfg.schedule, ro);

  const int N = cfg.N;
  std::vector<double> psi(N + 1);
  for (int i = 0; i <= N; ++i) {
    const double x = static_cast<double>(i) / N;
    psi[i] = 0.5 - 4.0 * (x - 0.5) * (x - 0.5);
  }
  std::vector<char> contact;
  const auto oracle = fk::oracle::obstacle_1d_pdas(N, 0.0, 0.0, psi, &contact);
  const auto u = nodal(rep.u);
  double err = 0.0;
  int contacts = 0;
  for (int i = 0; i <= N; ++i) {
    err = std::max(err, std::abs(u[i] - oracle[i]));
    contacts += contact[i];
  }

  // m(eta) from the report, support tested against the oracle's contact set
  const auto battery = fk::eta_battery(P.grid);
  double worst_sign = INFINITY, worst_off = 0.0;
  int off = 0;
  for (std::size_t j = 0; j < battery.size(); ++j) {
    const double m = rep.vi.at(j).m;
    worst_sign = std::min(worst_sign, m);
    bool touches = false;
    for (int i = 0; i <= N; ++i) touches = touches || (battery[j].field[i] != 0.0 && contact[i]);
    if (!touches) {
      ++off;
      worst_off = std::max(worst_off, std::abs(m));
    }
  }
  o.check(rep.converged(), "scheme converged (" + rep.outer_reason + ")");
  o.check(err <= 1e-6, "|u - active-set QP oracle|_inf = " + sci(err) + " (<= 1e-6), oracle contact nodes " +
                           std::to_string(contacts));
  o.check(contacts > 0, "contact set nonempty");
  o.check(worst_sign >= -1e-6, "min m(eta) over " + std::to_string(battery.size()) +
                                   " nonnegative test functions = " + sci(worst_sign) + " (>= -1e-6)");
  o.check(off > 0 && worst_off <= 1e-6, "max |m(eta)| over " + std::to_string(off) +
                                            " bumps off the contact set = " + sci(worst_off) + " (<= 1e-6)");
  return o;
}

// 7. Double phase with a = x1 in 2D.
Outcome double_phase() {
  Outcome o;
  const auto cfg = bundled("double_phase_2d");
  const auto rep = fk::run_scheme(cfg.problem(), cfg.schedule);
  const std::size_t J = rep.stages.size();

  double dis = INFINITY;
  std::set<std::string> ws;
  for (const auto& r : rep.dis_var) {
    dis = std::min(dis, r.margin);
    ws.insert(r.w);
  }
  bool dual_ok = rep.dual.rows.size() == J;
  double dual_slack = INFINITY;
  for (const auto& r : rep.dual.rows) {
    dual_ok = dual_ok && r.lhs <= r.rhs;
    dual_slack = std::min(dual_slack, r.rhs - r.lhs);
  }
  const double rel = std::abs(rep.fenchel_integrated) / scale(rep.pairing_integral, rep.primal_integral);

  bool monotone = J >= 3;
  const auto& fr = rep.sigma_table.fractions;
  for (std::size_t t = 0; monotone && t < rep.sigma_table.thresholds.size(); ++t)
    for (std::size_t j = J - 2; j < J; ++j) monotone = monotone && fr[j][t] <= fr[j - 1][t];

  o.check(rep.converged(), "scheme converged after " + std::to_string(J) + " stages (" + rep.outer_reason + ")");
  o.check(rep.dis_var.size() == 3 * J && ws.size() == 3 && dis >= -1e-6,
          "dis-var: " + std::to_string(rep.dis_var.size()) + " rows for w in {w0, u, random}, min margin " + sci(dis) +
              " (>= -1e-6)");
  o.check(dual_ok, "dual bound LHS <= RHS at all " + std::to_string(J) + " stages (min slack " + sci(dual_slack) + ")");
  o.check(rel <= 1e-6, "integrated Fenchel residual relative " + sci(rel) + " (<= 1e-6)");
  std::string fracs;
  for (std::size_t j = J - 3; j < J; ++j) {
    fracs += "[";
    for (double v : fr[j]) fracs += sci(v) + " ";
    fracs.back() = ']';
  }
  o.check(monotone, "sigma exceedance fractions over the last 3 stages nonincreasing " + fracs);
  return o;
}

// 8. The flawed difference-quotient inequality, and the one-sided form used instead.
Outcome difference_quotient() {
  Outcome o;
  const auto G = fk::make_energy("power_p", {{"p", 2.0}});
  const Vec2N x(0.5, 0.5), xi(1.0, 0.0), xik(0.0, 0.0);
  const Vec2N zeta = xi - xik;
  // claimed: |xi_k - xi|^2 <= |G(xi) - G(xi_k) - G'(xi).(xi - xi_k)|
  const double lhs = std::pow(norm(xik - xi), 2);
  const double rhs = std::abs(G(x, xi) - G(x, xik) - dot(G.derivative(x, xi), zeta));
  const bool claim = lhs <= rhs;
  o.check(!claim && lhs == 1.0 && rhs == 0.5, "flawed inequality evaluates to " + std::to_string(lhs) + " <= " +
                                                   std::to_string(rhs) + ": " + (claim ? "true" : "false"));

  // Corrected path: without absolute values, convexity makes the difference
  // quotient q(t) = (G(xi_k + t zeta) - G(xi_k)) / t nondecreasing in t, so
  // G'(xi_k).zeta <= q(t) <= q(1) for 0 < t <= 1. This one-sided bound is
  // what the implementation relies on (e.g. the chain
  // F(xi) <= xi.F'(xi) <= (F(t xi) - F(xi))/(t - 1) in the Fenchel check).
  Sampler rng(8000);
  double worst = INFINITY;
  for (const auto& F : fk::testing::zoo(2))
    for (int i = 0; i < 2000; ++i) {
      const Vec2N p = rng.point(2), base = rng.in_ball(2, 2.0), dir = rng.in_ball(2, 2.0);
      const double t = rng.uniform(1e-3, 1.0);
      const double q_t = (F(p, base + t * dir) - F(p, base)) / t;
      const double q_1 = F(p, base + dir) - F(p, base);
      const double d0 = dot(F.derivative(p, base), dir);
      const double tol = 1e-9 * scale(q_1, d0);
      worst = std::min({worst, q_t - d0 + tol, q_1 - q_t + tol});
    }
  o.check(worst >= 0.0, "one-sided bound G'(xi_k).zeta <= q(t) <= q(1) on 12000 zoo samples, margin " + sci(worst));
  return o;
}

// 9. H via the inverse of G against the argmax derivative of F_k.
Outcome appendix() {
  Outcome o;
  for (double p : {2.0, 4.0}) {
    const auto F = fk::make_energy("power_p", {{"p", p}});
    const auto conj = fk::conjugate_analytic(F);
    for (double k : {1.0, 4.0}) {
      const fk::RestrictedConjugate Rk(F, conj, k);
      const double tk = std::pow(k, 1.0 / (p - 1.0));  // |F'(xi)| = |xi|^{p-1} = k
      Sampler rng(9000 + static_cast<int>(p * 10 + k));
      double worst = 0.0;
      int straddling = 0;
      for (int i = 0; i < 1000; ++i) {
        const Vec2N x = rng.point(2);
        Vec2N xi;
        if (i % 4 == 0) {
          // within 1e-6 relative of the gluing sphere, alternating sides
          const double s = (i % 8 == 0 ? 1.0 : -1.0) * rng.uniform(1e-9, 1e-6);
          xi = rng.with_norm(2, tk * (1.0 + s));
          ++straddling;
        } else {
          xi = rng.in_ball(2, 4.0 * tk);
        }
        if (norm(xi) == 0.0) continue;
        const fk::AppendixMaps maps(F, x, k);
        worst = std::max(worst, norm(fk::h_via_inverse_map(maps, xi) - Rk.derivative(x, xi)));
      }
      o.check(worst <= 1e-6 * k, "power_p(" + std::to_string(static_cast<int>(p)) + ") k=" +
                                     std::to_string(static_cast<int>(k)) + ": max |H_inverse - H_argmax| = " +
                                     sci(worst) + " over 1000 points, " + std::to_string(straddling) +
                                     " at the gluing sphere (<= 1e-6 k)");
    }
  }
  return o;
}

// 10. Two identical CLI solves.
Outcome determinism() {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / "fenchelkit_acceptance_det";
  fs::remove_all(base);
  const std::string cfg = (kConfigs / "double_phase_2d.json").string();
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string("\"") + FENCHELKIT_CLI + "\" solve --quiet --config \"" + cfg + "\" --out \"" +
                            (base / run).string() + "\"";
    const int rc = std::system(cmd.c_str());
    o.check(rc == 0, std::string("run ") + run + " exit status " + std::to_string(rc));
  }
  auto without_timestamp = [](std::string s, bool& had) {
    const auto first = s.find('\n');
    const auto second = s.find('\n', first + 1);
    had = first != std::string::npos && s.substr(first, second - first).find("\"generated_at\"") != std::string::npos;
    return had ? s.erase(first, second - first) : s;
  };
  bool had_a = false, had_b = false;
  const std::string ra = without_timestamp(slurp(base / "a" / "solve_report.json"), had_a);
  const std::string rb = without_timestamp(slurp(base / "b" / "solve_report.json"), had_b);
  o.check(had_a && had_b, "timestamp confined to line 2 of both reports");
  o.check(!ra.empty() && ra == rb, "reports byte-identical outside the timestamp line (" + std::to_string(ra.size()) +
                                       " bytes)");
  for (const char* f : {"u.csv", "sigma.csv", "u.bin", "sigma.bin"}) {
    const std::string fa = slurp(base / "a" / f), fb = slurp(base / "b" / f);
    o.check(!fa.empty() && fa == fb, std::string(f) + " byte-identical");
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Huber closed form for |xi|^2/2 at k = 1", huber},
      {"Extension and F_k* certificates, zoo x k in {1, 4, 16}", certificates},
      {"Fenchel identity and inequality", fenchel},
      {"Superlinear / locally bounded duality probes", duality_probes},
      {"Quadratic 1D unconstrained solve, N = 64", quad_unconstrained},
      {"Quadratic 1D obstacle solve, N = 64", quad_obstacle},
      {"Double phase a = x1, 2D, N = 32", double_phase},
      {"Flawed difference-quotient inequality is false", difference_quotient},
      {"H via inverse map against the argmax derivative", appendix},
      {"Deterministic solve output", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu %s: %s (%.2f s)\n", i + 1, out.passed ? "PASS" : "FAIL", criteria[i].first.c_str(), secs);
    for (const auto& l : out.lines) std::printf("    %s\n", l.c_str());
    std::fflush(stdout);
    failed += !out.passed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
