#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fenchelkit/discretize/constraint.hpp"
#include "fenchelkit/discretize/operators.hpp"
#include "fenchelkit/legendre/conjugate.hpp"
#include "fenchelkit/solver/report.hpp"

namespace fenchelkit {

struct NamedField {
  std::string name;
  ScalarField field;
};

/// Tensor-product hat functions at 9 centres and half-widths 0.1 and 0.25,
/// cut to the interior. All are nonnegative, so they are admissible for
/// both constraint kinds. Hats the grid cannot resolve are dropped.
inline std::vector<NamedField> eta_battery(const Grid& g) {
  std::vector<Vec2N> centres;
  if (g.dim() == 1) {
    for (int i = 1; i <= 9; ++i) centres.emplace_back(i / 10.0);
  } else {
    for (double b : {0.25, 0.5, 0.75})
      for (double a : {0.25, 0.5, 0.75}) centres.emplace_back(a, b);
  }
  std::vector<NamedField> out;
  for (double width : {0.1, 0.25}) {
    for (const Vec2N& c : centres) {
      ScalarField eta(g);
      for (std::size_t i = 0; i < g.nodes(); ++i) {
        if (g.on_boundary(i)) continue;
        const Vec2N x = g.node_point(i);
        double v = 1.0;
        for (int a = 0; a < g.dim(); ++a) {
          const double w = std::min({width, c[a], 1.0 - c[a]});
          v *= std::max(0.0, 1.0 - std::abs(x[a] - c[a]) / w);
        }
        eta[i] = v;
      }
      if (max_abs(eta) == 0.0) continue;
      char label[96];
      if (g.dim() == 1)
        std::snprintf(label, sizeof label, "hat(c=%g,w=%g)", c[0], width);
      else
        std::snprintf(label, sizeof label, "hat(c=(%g,%g),w=%g)", c[0], c[1], width);
      out.push_back({label, std::move(eta)});
    }
  }
  return out;
}

/// A feasible field near w0: w0 plus a seeded interior perturbation of
/// amplitude 0.1, projected onto K.
inline ScalarField random_feasible(const ConstraintSet& K, const ScalarField& w0, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ScalarField w = w0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double r = unit(rng);
    if (!K.grid().on_boundary(i)) w[i] += 0.1 * r;
  }
  return K.project(w);
}

namespace detail {

/// c_j = |grad_h w|_1 + max_{i <= j} |grad_h u_i|_1 (running max).
inline std::vector<double> dis_var_constants(const SolveReport& rep, const ScalarField& w) {
  const double gw = l1_norm(gradient(rep.grid, w));
  std::vector<double> c;
  double running = 0.0;
  for (const auto& s : rep.stages) {
    running = std::max(running, s.grad_l1);
    c.push_back(gw + running);
  }
  return c;
}

}  // namespace detail

/// Discrete form of the perturbed minimality inequality at every stage:
///   sum_c sigma_j . grad_h(w - u_j) h^n + c eps_j >= -tol_vi  for w in K.
inline std::vector<DisVarRow> dis_var_check(const SolveReport& rep, const ConstraintSet& K,
                                            const std::vector<NamedField>& w_list, double tol_vi) {
  std::vector<DisVarRow> rows;
  for (const auto& [name, w] : w_list) {
    if (!K.contains(w, 1e-12)) throw ValidationError("dis_var_check: comparison field '" + name + "' is not in K");
    const auto c = detail::dis_var_constants(rep, w);
    for (std::size_t j = 0; j < rep.stages.size(); ++j) {
      const StageRecord& s = rep.stages[j];
      DisVarRow r;
      r.stage = s.index;
      r.w = name;
      r.pairing = flux_pairing(rep.grid, s.sigma, w - s.u);
      r.c = c[j];
      r.eps = s.eps;
      r.margin = r.pairing + r.c * r.eps;
      r.passed = r.margin >= -tol_vi;
      rows.push_back(r);
    }
  }
  return rows;
}

/// The dual integrability bound at every stage,
///   sum_c F*(x_c, sigma_j) h^n <= I(t w0)/(t-1) + c_j t eps_j/(t-1),
/// and the lower-semicontinuity analogue for the final sigma: its dual
/// integral is at most the smaller of the last two stage values (within
/// tol_dual relative).
inline DualBoundReport dual_integrability_check(const SolveReport& rep, const EnergyDensity& F,
                                                const ConjugateHandle& conj, double t, const ScalarField& w0,
                                                double tol_dual) {
  if (!(t > 1.0)) throw ValidationError("dual_integrability_check: t must be > 1");
  const Grid& g = rep.grid;
  DualBoundReport out;
  out.t = t;
  out.comparison_integral = energy(g, F, t * w0);
  const auto c = detail::dis_var_constants(rep, w0);
  auto dual_integral = [&](const VectorField& sigma, std::size_t& infinite) {
    double sum = 0.0;
    for (std::size_t cell = 0; cell < g.cells(); ++cell) {
      const ExtReal v = conj(g.cell_center(cell), sigma[cell]);
      if (!v.is_finite()) {
        ++infinite;
        continue;
      }
      sum += v.value();
    }
    return sum * g.cell_volume();
  };
  for (std::size_t j = 0; j < rep.stages.size(); ++j) {
    const StageRecord& s = rep.stages[j];
    DualBoundRow row;
    row.stage = s.index;
    row.lhs = dual_integral(s.sigma, row.infinite_cells);
    row.rhs = out.comparison_integral / (t - 1.0) + c[j] * t * s.eps / (t - 1.0);
    row.passed = row.infinite_cells == 0 && row.lhs <= row.rhs * (1.0 + tol_dual) + 1e-14;
    out.rows.push_back(row);
  }
  std::size_t infinite = 0;
  out.final_lhs = dual_integral(rep.sigma, infinite);
  out.liminf_lhs = INFINITY;
  for (std::size_t j = out.rows.size() >= 2 ? out.rows.size() - 2 : 0; j < out.rows.size(); ++j)
    out.liminf_lhs = std::min(out.liminf_lhs, out.rows[j].lhs);
  out.fatou_passed =
      infinite == 0 && (out.rows.empty() || out.final_lhs <= out.liminf_lhs + tol_dual * (1.0 + out.liminf_lhs));
  return out;
}

/// m(eta) = sum_c sigma_c . grad_h eta h^n for the final sigma. Unconstrained:
/// |m| <= tol_el |grad_h eta|_1. Obstacle: m >= -tol_el |grad_h eta|_1, and
/// |m| within the same bound for eta supported off the contact set.
inline std::vector<VIRow> variational_inequality_check(const SolveReport& rep, const ConstraintSet& K,
                                                       const std::vector<NamedField>& battery, double tol_el) {
  const Grid& g = rep.grid;
  std::vector<char> contact(g.nodes(), 0);
  for (std::size_t i : K.contact_set(rep.u, 1e-12)) contact[i] = 1;
  std::vector<VIRow> rows;
  for (const auto& [name, eta] : battery) {
    if (!K.admissible_direction(eta))
      throw ValidationError("variational_inequality_check: direction '" + name + "' is not admissible");
    VIRow r;
    r.eta = name;
    r.m = flux_pairing(g, rep.sigma, eta);
    r.grad_l1 = l1_norm(gradient(g, eta));
    for (std::size_t i = 0; i < g.nodes(); ++i)
      if (eta[i] != 0.0 && contact[i]) r.off_contact = false;
    const double bound = tol_el * r.grad_l1;
    if (K.kind() == ConstraintKind::unconstrained)
      r.passed = std::abs(r.m) <= bound;
    else
      r.passed = r.m >= -bound && (!r.off_contact || std::abs(r.m) <= bound);
    rows.push_back(r);
  }
  return rows;
}

/// Per-cell residual F*(sigma) + F(xi) - sigma . xi at xi = grad_h u, and the
/// chain F(xi) <= xi.F'(xi) <= (F(t xi) - F(xi))/(t-1) <= F(t xi)/(t-1).
inline FenchelField fenchel_identity_field(const SolveReport& rep, const EnergyDensity& F, const ConjugateHandle& conj,
                                           double t) {
  const Grid& g = rep.grid;
  FenchelField out;
  out.residual.resize(g.cells());
  out.chain_worst_margin = INFINITY;
  bool residual_ok = true;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const Vec2N x = g.cell_center(c);
    const Vec2N xi = detail::cell_gradient(g, rep.u, c);
    const Vec2N& s = rep.sigma[c];
    const double Fx = F(x, xi), pair = dot(s, xi);
    const ExtReal fs = conj(x, s);
    const double r = fs.is_finite() ? fs.value() + Fx - pair : INFINITY;
    out.residual[c] = r;
    out.max_abs = std::max(out.max_abs, std::abs(r));
    out.l1 += std::abs(r);
    if (!(std::abs(r) <= 1e-8 * (1.0 + std::max(std::abs(Fx), std::abs(pair))))) residual_ok = false;

    const double Ft = F(x, t * xi);
    const double a = Fx, b = dot(xi, F.derivative(x, xi)), q = (Ft - Fx) / (t - 1.0), e = Ft / (t - 1.0);
    const double tol = 1e-10 * (1.0 + std::abs(e));
    const double margin = std::min({b - a, q - b, e - q}) + tol;
    ++out.chain_cells;
    out.chain_worst_margin = std::min(out.chain_worst_margin, margin);
    if (margin < 0.0) ++out.chain_violations;
  }
  out.l1 *= g.cell_volume();
  out.passed = residual_ok && out.chain_violations == 0;
  return out;
}

/// Volume fraction of cells with |sigma_j - sigma| > threshold per stage,
/// and |sigma_j - sigma|_1.
inline SigmaTable sigma_convergence_probe(const SolveReport& rep, const std::vector<double>& thresholds) {
  const Grid& g = rep.grid;
  SigmaTable out;
  out.thresholds = thresholds;
  for (const auto& s : rep.stages) {
    std::vector<double> frac(thresholds.size(), 0.0);
    double l1 = 0.0;
    for (std::size_t c = 0; c < g.cells(); ++c) {
      const double d = norm(s.sigma[c] - rep.sigma[c]);
      l1 += d;
      for (std::size_t e = 0; e < thresholds.size(); ++e)
        if (d > thresholds[e]) frac[e] += 1.0;
    }
    for (double& f : frac) f /= static_cast<double>(g.cells());
    out.fractions.push_back(std::move(frac));
    out.l1.push_back(l1 * g.cell_volume());
  }
  const std::size_t J = out.fractions.size();
  out.nonincreasing_last3 = J >= 3;
  for (std::size_t j = J >= 3 ? J - 2 : J; j < J; ++j)
    for (std::size_t e = 0; e < thresholds.size(); ++e)
      if (out.fractions[j][e] > out.fractions[j - 1][e]) out.nonincreasing_last3 = false;
  return out;
}

}  // namespace fenchelkit
