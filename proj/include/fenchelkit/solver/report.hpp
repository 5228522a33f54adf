#pragma once

#include <string>
#include <vector>

#include "fenchelkit/discretize/constraint.hpp"
#include "fenchelkit/discretize/grid.hpp"
#include "fenchelkit/solver/minimize.hpp"
#include "fenchelkit/solver/problem.hpp"
#include "fenchelkit/solver/schedule.hpp"

namespace fenchelkit {

struct StageRecord {
  int index = 0;
  double k = 0.0;
  double eps = 0.0;
  double lambda = 0.0;  // sqrt(eps), recorded only
  ScalarField u{Grid(1, 4)};
  VectorField sigma{Grid(1, 4)};  // F_k'(x_c, grad_h u) per cell
  double energy_k = 0.0;
  double warm_energy_k = 0.0;
  double stationarity = 0.0;
  int iterations = 0;
  MinimizeStatus status = MinimizeStatus::nonconverged;
  double grad_l1 = 0.0;        // |grad_h u|_1
  double coercivity_bound = 0.0;
  double max_flux = 0.0;       // max_c |F'(x_c, grad_h u)|
  double change_l1 = -1.0;     // |u_j - u_{j-1}|_1, -1 on the first stage

  bool ok() const { return status != MinimizeStatus::nonconverged; }
};

struct DisVarRow {
  int stage = 0;
  std::string w;
  double pairing = 0.0;  // sum_c sigma_j . grad_h(w - u_j) h^n
  double c = 0.0;
  double eps = 0.0;
  double margin = 0.0;   // pairing + c eps
  bool passed = false;
};

struct DualBoundRow {
  int stage = 0;
  double lhs = 0.0;  // sum_c F*(x_c, sigma_j) h^n
  double rhs = 0.0;
  std::size_t infinite_cells = 0;
  bool passed = false;
};

struct DualBoundReport {
  double t = 2.0;
  double comparison_integral = 0.0;  // sum_c F(x_c, t grad_h w0) h^n
  std::vector<DualBoundRow> rows;
  double final_lhs = 0.0;
  double liminf_lhs = 0.0;  // min over the second half of the stages
  bool fatou_passed = false;
  bool passed() const {
    if (!fatou_passed) return false;
    for (const auto& r : rows)
      if (!r.passed) return false;
    return true;
  }
};

struct VIRow {
  std::string eta;
  double m = 0.0;  // sum_c sigma_c . grad_h eta h^n
  double grad_l1 = 0.0;
  bool off_contact = true;
  bool passed = false;
};

struct FenchelField {
  std::vector<double> residual;  // per cell
  double max_abs = 0.0;
  double l1 = 0.0;
  std::size_t chain_cells = 0;
  std::size_t chain_violations = 0;
  double chain_worst_margin = 0.0;
  bool passed = false;
};

struct SigmaTable {
  std::vector<double> thresholds;
  std::vector<std::vector<double>> fractions;  // [stage][threshold]
  std::vector<double> l1;                      // |sigma_j - sigma|_1
  bool nonincreasing_last3 = false;
};

struct SolveReport {
  Grid grid{1, 4};
  std::string energy;
  std::string constraint;
  double t = 2.0;
  Tolerances tol;
  Schedule schedule;

  std::vector<StageRecord> stages;
  bool outer_converged = false;
  std::string outer_reason;

  ScalarField u{Grid(1, 4)};
  VectorField sigma{Grid(1, 4)};  // F'(x_c, grad_h u)
  double primal_integral = 0.0;
  double dual_integral = 0.0;
  double pairing_integral = 0.0;
  double fenchel_integrated = 0.0;  // |dual + primal - pairing| / (1 + |pairing|)
  std::vector<double> energy_chain;  // I_{k_j}(u) per stage
  double final_energy = 0.0;         // I(u)

  std::vector<DisVarRow> dis_var;
  DualBoundReport dual;
  std::vector<VIRow> vi;
  FenchelField fenchel;
  SigmaTable sigma_table;

  bool converged() const {
    if (!outer_converged) return false;
    for (const auto& s : stages)
      if (!s.ok()) return false;
    return true;
  }

  /// Every diagnostic within tolerance.
  bool diagnostics_passed() const {
    for (const auto& r : dis_var)
      if (!r.passed) return false;
    for (const auto& r : vi)
      if (!r.passed) return false;
    if (!dual.passed() || !fenchel.passed) return false;
    if (fenchel_integrated > tol.fenchel) return false;
    if (stages.size() >= 3 && !sigma_table.nonincreasing_last3) return false;
    return energy_chain_ok();
  }

  bool energy_chain_ok() const {
    for (double v : energy_chain)
      if (v > final_energy + 1e-10 * (1.0 + std::abs(final_energy))) return false;
    return energy_chain.empty() ||
           std::abs(energy_chain.back() - final_energy) <= 1e-8 * (1.0 + std::abs(final_energy));
  }
};

}  // namespace fenchelkit
