#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fenchelkit/discretize/constraint.hpp"
#include "fenchelkit/discretize/field_io.hpp"
#include "fenchelkit/discretize/grid.hpp"
#include "fenchelkit/discretize/operators.hpp"
#include "test_support.hpp"

namespace fk = fenchelkit;
using fk::Vec2N;
using fk::testing::Sampler;
using fk::testing::scale;

namespace {

fk::ScalarField random_field(const fk::Grid& g, Sampler& rng, double amp) {
  fk::ScalarField u(g);
  for (std::size_t i = 0; i < g.nodes(); ++i) u[i] = rng.uniform(-amp, amp);
  return u;
}

fk::ScalarField interior_random(const fk::Grid& g, Sampler& rng, double amp) {
  fk::ScalarField u = random_field(g, rng, amp);
  for (std::size_t i = 0; i < g.nodes(); ++i)
    if (g.on_boundary(i)) u[i] = 0.0;
  return u;
}

}  // namespace

TEST(Grid, CountsAndIndexing) {
  const fk::Grid g(2, 8);
  EXPECT_EQ(g.nodes(), 81u);
  EXPECT_EQ(g.cells(), 64u);
  EXPECT_DOUBLE_EQ(g.h(), 0.125);
  EXPECT_EQ(g.node(3, 2), 3u + 9u * 2u);
  EXPECT_EQ(g.node_coords(g.node(5, 7))[1], 7);
  EXPECT_TRUE(g.on_boundary(g.node(0, 4)));
  EXPECT_TRUE(g.on_boundary(g.node(3, 8)));
  EXPECT_FALSE(g.on_boundary(g.node(3, 4)));
  EXPECT_NEAR(g.cell_center(g.cell(0, 0))[0], 0.0625, 0.0);
  EXPECT_THROW(fk::Grid(2, 3), fk::ValidationError);
  EXPECT_THROW(fk::Grid(3, 8), fk::ValidationError);
  EXPECT_THROW(fk::ScalarField(g, std::vector<double>(80, 0.0)), fk::ValidationError);
  std::vector<double> bad(81, 0.0);
  bad[5] = NAN;
  EXPECT_THROW(fk::ScalarField(g, bad), fk::ValidationError);
}

TEST(Gradient, HandComputed1D) {
  const fk::Grid g(1, 4);
  const fk::ScalarField u(g, {0.0, 0.25, 0.5, 0.75, 1.0});
  const auto G = fk::gradient(g, u);
  for (std::size_t c = 0; c < g.cells(); ++c) EXPECT_EQ(G[c][0], 1.0);
}

TEST(Gradient, AffineIsExactAndZeroIsZero) {
  const fk::Grid g(2, 16);
  const auto u = fk::ScalarField::from_expression(g, fk::Expression::parse("0.3 + 2*x1 - 0.5*x2"));
  for (const Vec2N& v : fk::gradient(g, u).values()) {
    EXPECT_NEAR(v[0], 2.0, 1e-12);
    EXPECT_NEAR(v[1], -0.5, 1e-12);
  }
  for (const Vec2N& v : fk::gradient(g, fk::ScalarField(g)).values()) EXPECT_EQ(fk::norm(v), 0.0);
}

TEST(Gradient, AdjointIdentityOnInteriorFields) {
  Sampler rng(1);
  for (int n : {1, 2}) {
    const fk::Grid g(n, 9);
    fk::VectorField sigma(g);
    for (std::size_t c = 0; c < g.cells(); ++c) sigma[c] = rng.in_ball(n, 3.0);
    const auto eta = interior_random(g, rng, 1.0);
    // <grad^T sigma, eta> = h^n sum sigma . grad eta for eta zero on the boundary
    EXPECT_NEAR(fk::inner(fk::gradient_adjoint(g, sigma), eta), fk::flux_pairing(g, sigma, eta), 1e-12);
  }
}

TEST(Energy, QuadraticOfIdentity) {
  const fk::Grid g(1, 16);
  const auto F = fk::make_energy("power_p", {{"p", 2.0}});
  const auto u = fk::ScalarField::from_function(g, [](const Vec2N& x) { return x[0]; });
  EXPECT_NEAR(fk::energy(g, F, u), 0.5, 1e-14);
  EXPECT_EQ(fk::energy(g, F, fk::ScalarField(g, 3.0)), 0.0);
}

TEST(Energy, ConstantIsZeroAcrossZoo) {
  for (int n : {1, 2}) {
    const fk::Grid g(n, 8);
    for (const auto& F : fk::testing::zoo(n)) EXPECT_EQ(fk::energy(g, F, fk::ScalarField(g, -1.5)), 0.0) << F.name();
  }
}

TEST(Energy, RestrictedBelowFull) {
  Sampler rng(2);
  for (int n : {1, 2}) {
    const fk::Grid g(n, 8);
    for (const auto& F : fk::testing::zoo(n)) {
      const auto conj = fk::conjugate_analytic(F);
      for (double k : {0.5, 2.0, 8.0}) {
        const fk::RestrictedConjugate Rk(F, conj, k, fk::RadialSolve::optimality);
        for (int t = 0; t < 3; ++t) {
          const auto u = random_field(g, rng, 1.0);
          const double I = fk::energy(g, F, u);
          const double Ik = fk::energy(g, Rk, u);
          EXPECT_LE(Ik, I + 1e-10 * scale(I, 0)) << F.name() << " k=" << k;
          EXPECT_GE(Ik, 0.0);
        }
      }
    }
  }
}

TEST(Energy, CellBoundDensityMatchesDirectEvaluation) {
  Sampler rng(3);
  const fk::Grid g(2, 8);
  for (const auto& F : fk::testing::zoo(2)) {
    const fk::RestrictedConjugate Rk(F, fk::conjugate_analytic(F), 3.0, fk::RadialSolve::optimality);
    const fk::CellRestricted bound(Rk, g);
    const auto u = random_field(g, rng, 1.0);
    const double a = fk::energy(g, Rk, u), b = fk::energy(g, bound, u);
    EXPECT_NEAR(a, b, 1e-12 * scale(a, b)) << F.name();
  }
}

TEST(EnergyGradient, QuadraticIsLaplacianStencil) {
  Sampler rng(4);
  const auto F = fk::make_energy("power_p", {{"p", 2.0}});
  for (int n : {1, 2}) {
    const fk::Grid g(n, 8);
    const auto u = random_field(g, rng, 1.0);
    const auto grad = fk::energy_gradient(g, F, u);
    const double s = std::pow(g.h(), n - 2);
    const int N = g.cells_per_axis();
    for (std::size_t idx = 0; idx < g.nodes(); ++idx) {
      if (g.on_boundary(idx)) {
        EXPECT_EQ(grad[idx], 0.0);
        continue;
      }
      const auto [i, j] = g.node_coords(idx);
      double lap = 2.0 * n * u[idx] - u[g.node(i - 1, j)] - u[g.node(i + 1, j)];
      if (n == 2) lap -= u[g.node(i, j - 1)] + u[g.node(i, j + 1)];
      EXPECT_NEAR(grad[idx], s * lap, 1e-11 * (1 + std::abs(s * lap))) << n << " " << i << "," << j << " N=" << N;
    }
  }
}

TEST(EnergyGradient, AffineIsStationary) {
  const auto F = fk::make_energy("power_p", {{"p", 2.0}});
  const fk::Grid g(2, 10);
  const auto u = fk::ScalarField::from_expression(g, fk::Expression::parse("1 - x1 + 3*x2"));
  EXPECT_LE(fk::max_abs(fk::energy_gradient(g, F, u)), 1e-12);
}

TEST(EnergyGradient, MatchesCentralDifferences) {
  Sampler rng(5);
  for (int n : {1, 2}) {
    const fk::Grid g(n, 8);
    for (const auto& F : fk::testing::zoo(n)) {
      const auto conj = fk::conjugate_analytic(F);
      const fk::RestrictedConjugate Rk(F, conj, 2.0, fk::RadialSolve::optimality);
      for (int d = 0; d < 20; ++d) {
        // keep the smooth energies away from |xi| = 0 corners by adding a tilt
        const auto u = random_field(g, rng, 0.3) +
                       fk::ScalarField::from_function(g, [](const Vec2N& x) { return 2.0 * x[0]; });
        const auto delta = interior_random(g, rng, 1.0);
        const double t = 1e-5;
        for (int which = 0; which < 2; ++which) {
          double fd, an;
          if (which == 0) {
            fd = (fk::energy(g, F, u + t * delta) - fk::energy(g, F, u - t * delta)) / (2 * t);
            an = fk::inner(fk::energy_gradient(g, F, u), delta);
          } else {
            fd = (fk::energy(g, Rk, u + t * delta) - fk::energy(g, Rk, u - t * delta)) / (2 * t);
            an = fk::inner(fk::energy_gradient(g, Rk, u), delta);
          }
          EXPECT_LE(std::abs(fd - an), 1e-6 * scale(fd, an)) << F.name() << " n=" << n << " which=" << which;
        }
      }
    }
  }
}

TEST(Energy, ConvexAlongSegments) {
  Sampler rng(6);
  for (int n : {1, 2}) {
    const fk::Grid g(n, 8);
    for (const auto& F : fk::testing::zoo(n)) {
      const fk::RestrictedConjugate Rk(F, fk::conjugate_analytic(F), 1.5, fk::RadialSolve::optimality);
      for (int t = 0; t < 10; ++t) {
        const auto u = random_field(g, rng, 1.0), v = random_field(g, rng, 1.0);
        const double lam = rng.uniform(0.0, 1.0);
        const auto mid = lam * u + (1 - lam) * v;
        for (int which = 0; which < 2; ++which) {
          auto I = [&](const fk::ScalarField& w) { return which == 0 ? fk::energy(g, F, w) : fk::energy(g, Rk, w); };
          const double rhs = lam * I(u) + (1 - lam) * I(v);
          EXPECT_LE(I(mid), rhs + 1e-10 * scale(rhs, 0)) << F.name();
        }
      }
    }
  }
}

TEST(Energy, MonotoneExhaustionInK) {
  Sampler rng(7);
  for (int n : {1, 2}) {
    const fk::Grid g(n, 8);
    for (const auto& F : fk::testing::zoo(n)) {
      const auto conj = fk::conjugate_analytic(F);
      const auto u = random_field(g, rng, 0.5);
      const double I = fk::energy(g, F, u);
      double kmax = 0.0;
      for (const Vec2N& s : fk::flux(g, F, u).values()) kmax = std::max(kmax, fk::norm(s));
      double prev = -INFINITY;
      double last = 0.0;
      // once k exceeds every realized |F'|, F_k = F on all cell gradients
      for (double k = 0.25; k < 2.0 * kmax + 1.0; k *= 2.0) {
        const double Ik = fk::energy(g, fk::RestrictedConjugate(F, conj, k, fk::RadialSolve::optimality), u);
        EXPECT_GE(Ik, prev - 1e-12 * scale(Ik, 0)) << F.name() << " k=" << k;
        prev = last = Ik;
      }
      EXPECT_NEAR(last, I, 1e-9 * scale(I, 0)) << F.name();
    }
  }
}

TEST(Constraint, ObstacleProjectionExample) {
  const fk::Grid g(1, 4);
  const fk::ScalarField u0(g, 0.0);
  fk::ScalarField psi(g, 0.2);
  psi[0] = psi[4] = 0.0;
  const auto K = fk::ConstraintSet::with_obstacle(u0, psi);
  const auto p = fk::project_K(K, fk::ScalarField(g, 0.0));
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[4], 0.0);
  for (int i = 1; i < 4; ++i) EXPECT_EQ(p[static_cast<std::size_t>(i)], 0.2);
  EXPECT_TRUE(K.contains(p));
  EXPECT_FALSE(K.contains(fk::ScalarField(g, 0.0)));
}

TEST(Constraint, UnconstrainedOnlyTouchesBoundary) {
  Sampler rng(8);
  const fk::Grid g(2, 6);
  const auto u0 = random_field(g, rng, 1.0);
  const auto K = fk::ConstraintSet::unconstrained(u0);
  const auto v = random_field(g, rng, 1.0);
  const auto p = fk::project_K(K, v);
  for (std::size_t i = 0; i < g.nodes(); ++i) EXPECT_EQ(p[i], g.on_boundary(i) ? u0[i] : v[i]);
  EXPECT_EQ(K.kind(), fk::ConstraintKind::unconstrained);
}

TEST(Constraint, RejectsObstacleAboveBoundaryData) {
  const fk::Grid g(1, 4);
  fk::ScalarField psi(g, 0.0);
  psi[4] = 0.1;
  EXPECT_THROW(fk::ConstraintSet::with_obstacle(fk::ScalarField(g, 0.0), psi), fk::ValidationError);
  // an inactive node may sit above
  std::vector<char> active(g.nodes(), 1);
  active[4] = 0;
  EXPECT_NO_THROW(fk::ConstraintSet::with_obstacle(fk::ScalarField(g, 0.0), psi, active));
}

TEST(Constraint, ProjectionProperties) {
  Sampler rng(9);
  for (int n : {1, 2}) {
    const fk::Grid g(n, 8);
    const auto u0 = fk::ScalarField::from_expression(g, fk::Expression::parse("x1 + 0.5*x2"));
    const auto psi = fk::ScalarField::from_expression(g, fk::Expression::parse("0.5 - 4*(x1-0.5)^2 - 4*(x2-0.5)^2 - 2"));
    for (const auto& K : {fk::ConstraintSet::unconstrained(u0), fk::ConstraintSet::with_obstacle(u0, psi)}) {
      for (int t = 0; t < 50; ++t) {
        const auto v = random_field(g, rng, 3.0), w = random_field(g, rng, 3.0);
        const auto pv = K.project(v), pw = K.project(w);
        EXPECT_TRUE(K.contains(pv));
        EXPECT_EQ(K.project(pv).values(), pv.values());
        EXPECT_LE(fk::max_abs(pv - pw), fk::max_abs(v - w) + 1e-15);
        EXPECT_EQ(K.contains(v), K.project(v).values() == v.values());
        EXPECT_TRUE(K.contains(0.5 * pv + 0.5 * pw, 1e-15));
      }
    }
  }
}

TEST(Constraint, AdmissibleDirections) {
  const fk::Grid g(2, 6);
  const fk::ScalarField u0(g, 0.0);
  const fk::ScalarField psi(g, -1.0);
  const auto free = fk::ConstraintSet::unconstrained(u0);
  const auto obst = fk::ConstraintSet::with_obstacle(u0, psi);
  auto bump = fk::ScalarField::from_function(g, [](const Vec2N& x) { return x[0] * (1 - x[0]) * x[1] * (1 - x[1]); });
  for (std::size_t i = 0; i < g.nodes(); ++i)
    if (g.on_boundary(i)) bump[i] = 0.0;
  EXPECT_TRUE(fk::admissible_direction_check(free, bump));
  EXPECT_TRUE(fk::admissible_direction_check(free, -1.0 * bump));
  EXPECT_TRUE(fk::admissible_direction_check(obst, bump));
  auto neg = bump;
  neg[g.node(3, 3)] = -0.01;
  EXPECT_FALSE(fk::admissible_direction_check(obst, neg));
  auto edge = bump;
  edge[g.node(0, 2)] = 0.5;
  EXPECT_THROW(fk::admissible_direction_check(free, edge), fk::ValidationError);
}

TEST(FieldIO, CsvRoundTrip) {
  Sampler rng(10);
  for (int n : {1, 2}) {
    const fk::Grid g(n, 5);
    const auto u = random_field(g, rng, 1e3);
    std::stringstream ss;
    fk::write_csv(ss, u);
    const std::string header = n == 1 ? "i,value" : "i,j,value";
    EXPECT_EQ(ss.str().substr(0, header.size()), header);
    EXPECT_EQ(fk::read_csv(ss, g).values(), u.values());
  }
}

TEST(FieldIO, CsvRejectsBadInput) {
  const fk::Grid g(1, 4);
  std::stringstream wrong_header("x,value\n");
  EXPECT_THROW(fk::read_csv(wrong_header, g), fk::ValidationError);
  std::stringstream missing("i,value\n0,1\n1,2\n");
  EXPECT_THROW(fk::read_csv(missing, g), fk::ValidationError);
  std::stringstream junk("i,value\n0,1\n1,abc\n");
  EXPECT_THROW(fk::read_csv(junk, g), fk::ValidationError);
}

TEST(FieldIO, BinaryRoundTripAndLayout) {
  Sampler rng(11);
  for (int n : {1, 2}) {
    const fk::Grid g(n, 6);
    const auto u = random_field(g, rng, 1.0);
    std::stringstream ss;
    fk::write_binary(ss, u);
    const std::string bytes = ss.str();
    EXPECT_EQ(bytes.substr(0, 8), "FKFIELD1");
    EXPECT_EQ(bytes.size(), 8u + 4u * (2u + static_cast<unsigned>(n)) + 8u * g.nodes());
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), static_cast<unsigned>(n));
    const auto back = fk::read_binary(ss);
    EXPECT_EQ(back.grid(), g);
    EXPECT_EQ(back.values(), u.values());
  }
  std::stringstream bad("NOTAFILE");
  EXPECT_THROW(fk::read_binary(bad), fk::ValidationError);
}
