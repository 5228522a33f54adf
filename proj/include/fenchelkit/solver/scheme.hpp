#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fenchelkit/core/probes.hpp"
#include "fenchelkit/discretize/operators.hpp"
#include "fenchelkit/legendre/conjugate.hpp"
#include "fenchelkit/legendre/restricted.hpp"
#include "fenchelkit/solver/diagnostics.hpp"
#include "fenchelkit/solver/minimize.hpp"
#include "fenchelkit/solver/problem.hpp"
#include "fenchelkit/solver/report.hpp"
#include "fenchelkit/solver/schedule.hpp"

namespace fenchelkit {

struct RunOptions {
  std::optional<ScalarField> warm_start;  // stage 0 start, defaults to w0
  std::vector<double> sigma_thresholds{1e-1, 1e-2, 1e-3};
  bool diagnostics = true;
  std::function<void(const StageRecord&)> on_stage;
};

inline std::string describe(const EnergyDensity& F) {
  std::ostringstream os;
  os << F.name();
  if (!F.params().empty()) {
    os << '(';
    bool first = true;
    for (const auto& [k, v] : F.params()) {
      os << (first ? "" : ", ") << k << '=' << v;
      first = false;
    }
    os << ')';
  }
  return os.str();
}

namespace detail {

/// Sampled M_{F*}(r) = max over the cell centres and a ring of directions
/// of F*(x_c, r d).
inline double dual_local_bound(const Grid& g, const ConjugateHandle& conj, double r) {
  double m = 0.0;
  for (const Vec2N& d : sphere_directions(g.dim(), 32))
    for (std::size_t c = 0; c < g.cells(); ++c) {
      const ExtReal v = conj(g.cell_center(c), r * d);
      m = std::max(m, v.is_finite() ? v.value() : INFINITY);
    }
  return m;
}

inline double max_flux(const Grid& g, const EnergyDensity& F, const ScalarField& u) {
  double m = 0.0;
  const VectorField sigma = flux(g, F, u);
  for (const Vec2N& s : sigma.values()) m = std::max(m, norm(s));
  return m;
}

}  // namespace detail

/// Fills the diagnostic tables of a finished run: dis-var margins for w0,
/// the final u and a random feasible field; the dual bound; the VI battery;
/// the Fenchel field; and the sigma convergence table.
inline void run_diagnostics(const Problem& P, SolveReport& rep, const std::vector<double>& thresholds) {
  const auto conj = conjugate_analytic(P.F);
  rep.dis_var = dis_var_check(rep, P.K,
                              {{"w0", P.w0}, {"u", rep.u}, {"random", random_feasible(P.K, P.w0, P.seed)}},
                              P.tol.vi);
  rep.dual = dual_integrability_check(rep, P.F, conj, P.t, P.w0, P.tol.dual);
  rep.vi = variational_inequality_check(rep, P.K, eta_battery(P.grid), P.tol.el);
  rep.fenchel = fenchel_identity_field(rep, P.F, conj, P.t);
  rep.sigma_table = sigma_convergence_probe(rep, thresholds);
}

/// The approximation scheme: for each stage j an eps_j-almost minimizer u_j
/// of I_{k_j} over K, warm-started from u_{j-1}, and sigma_j = F_{k_j}'(grad u_j).
/// The outer loop stops once at least min_stages stages ran,
/// k_J >= 2 max_c |F'(x_c, grad_h u_J)| (so F_{k_J} = F on every realized
/// gradient) and |u_J - u_{J-1}|_1 <= tol.outer. The final u is u_J and
/// sigma = F'(grad_h u).
inline SolveReport run_scheme(const Problem& P, const Schedule& sched, const RunOptions& opt = {}) {
  sched.validate();
  const Grid& g = P.grid;
  require_same_grid(g, P.K.grid(), "run_scheme");
  if (!P.K.contains(P.w0, 1e-12)) throw ValidationError("run_scheme: w0 is not in K");

  SolveReport rep;
  rep.grid = g;
  rep.constraint = to_string(P.K.kind());
  rep.t = P.t;
  rep.tol = P.tol;
  rep.schedule = sched;

  // integrability hypothesis on the comparison function
  const double comparison = energy(g, P.F, P.t * P.w0);
  if (!std::isfinite(comparison))
    throw SchemeAbort("hypothesis check failed: the discrete integral of F(x, t grad w0) is not finite (t=" +
                      std::to_string(P.t) + ")");
  const double I_w0 = energy(g, P.F, P.w0);

  const auto conj = conjugate_analytic(P.F);
  ScalarField warm = opt.warm_start ? *opt.warm_start : P.w0;
  if (!P.K.contains(warm, 1e-12)) throw ValidationError("run_scheme: warm start is not in K");

  for (std::size_t j = 0; j < sched.size(); ++j) {
    const double k = sched.k_values[j], eps = sched.eps_values[j];
    const RestrictedConjugate Rk(P.F, conj, k, RadialSolve::optimality);
    const CellRestricted density(Rk, g);
    MinimizeResult mr = almost_minimize(P, density, P.K, eps, warm);

    StageRecord s;
    s.index = static_cast<int>(j);
    s.k = k;
    s.eps = eps;
    s.lambda = std::sqrt(eps);
    s.u = mr.u;
    s.sigma = flux(g, density, mr.u);
    s.energy_k = mr.energy;
    s.warm_energy_k = mr.warm_energy;
    s.stationarity = mr.stationarity;
    s.iterations = mr.iterations;
    s.status = mr.status;
    s.grad_l1 = l1_norm(gradient(g, mr.u));
    s.max_flux = detail::max_flux(g, P.F, mr.u);
    if (j > 0) s.change_l1 = l1_norm(mr.u - rep.stages.back().u);

    // F_k >= F_{k'} >= k'|xi| - M_{F*}(k') with k' = min(k, 1), and a near
    // minimizer has I_k(u_j) close to at most I(w0)
    const double kp = std::min(k, 1.0);
    s.coercivity_bound = 10.0 * (1.0 + (I_w0 + detail::dual_local_bound(g, conj, kp)) / kp);
    if (!(s.grad_l1 <= s.coercivity_bound))
      throw SchemeAbort("coercivity check failed at stage " + std::to_string(j) + ": |grad u|_1 = " +
                        std::to_string(s.grad_l1) + " exceeds " + std::to_string(s.coercivity_bound));

    rep.stages.push_back(s);
    if (opt.on_stage) opt.on_stage(rep.stages.back());
    warm = mr.u;

    const bool enough = j + 1 >= static_cast<std::size_t>(sched.min_stages) && j >= 1;
    if (enough && k >= 2.0 * s.max_flux && s.change_l1 <= P.tol.outer) {
      rep.outer_converged = true;
      rep.outer_reason = "k >= 2 max|F'| and |u_J - u_{J-1}|_1 <= tol_outer at stage " + std::to_string(j);
      break;
    }
  }
  if (!rep.outer_converged)
    rep.outer_reason = "schedule exhausted before the coincidence and stability criteria held";

  rep.u = rep.stages.back().u;
  rep.sigma = flux(g, P.F, rep.u);
  rep.primal_integral = energy(g, P.F, rep.u);
  rep.pairing_integral = flux_pairing(g, rep.sigma, rep.u);
  {
    double d = 0.0;
    for (std::size_t c = 0; c < g.cells(); ++c) d += conj(g.cell_center(c), rep.sigma[c]).value();
    rep.dual_integral = d * g.cell_volume();
  }
  rep.fenchel_integrated = std::abs(rep.dual_integral + rep.primal_integral - rep.pairing_integral) /
                           (1.0 + std::abs(rep.pairing_integral));
  for (const auto& s : rep.stages)
    rep.energy_chain.push_back(energy(g, RestrictedConjugate(P.F, conj, s.k, RadialSolve::optimality), rep.u));
  rep.final_energy = rep.primal_integral;

  if (opt.diagnostics) run_diagnostics(P, rep, opt.sigma_thresholds);
  return rep;
}

}  // namespace fenchelkit
