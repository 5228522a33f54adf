#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <string>

#include <json.hpp>

#include "fenchelkit/solver/report.hpp"

namespace fenchelkit {

inline constexpr const char* kSolveReportSchema = "fenchelkit.solve_report/1";

namespace detail {

using ojson = nlohmann::ordered_json;

/// Finite doubles as numbers, the rest as the strings "inf", "-inf", "nan".
inline ojson num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline ojson field_json(const ScalarField& u) {
  ojson a = ojson::array();
  for (double v : u.values()) a.push_back(num(v));
  return a;
}

inline ojson field_json(const VectorField& V) {
  ojson a = ojson::array();
  for (const Vec2N& v : V.values()) {
    ojson c = ojson::array();
    for (int i = 0; i < v.n; ++i) c.push_back(num(v[i]));
    a.push_back(std::move(c));
  }
  return a;
}

inline std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

/// The report as JSON. "generated_at" is the first key so that, dumped with
/// indentation, the timestamp sits alone on the second line; everything
/// else is a deterministic function of the run.
inline nlohmann::ordered_json to_json(const SolveReport& r, const std::string& generated_at = detail::utc_now()) {
  using detail::num;
  using detail::ojson;
  ojson j;
  j["generated_at"] = generated_at;
  j["schema"] = kSolveReportSchema;

  ojson tol;
  tol["stat"] = r.tol.stat;
  tol["vi"] = r.tol.vi;
  tol["el"] = r.tol.el;
  tol["outer"] = r.tol.outer;
  tol["fenchel"] = r.tol.fenchel;
  tol["dual"] = r.tol.dual;
  tol["max_iterations"] = r.tol.max_iterations;
  ojson sched;
  sched["k"] = r.schedule.k_values;
  sched["eps"] = r.schedule.eps_values;
  sched["min_stages"] = r.schedule.min_stages;
  j["problem"] = {{"energy", r.energy},
                  {"constraint", r.constraint},
                  {"n", r.grid.dim()},
                  {"N", r.grid.cells_per_axis()},
                  {"t", r.t},
                  {"tolerances", tol},
                  {"schedule", sched}};

  j["status"] = {{"converged", r.converged()},
                 {"outer_converged", r.outer_converged},
                 {"outer_reason", r.outer_reason},
                 {"diagnostics_passed", r.diagnostics_passed()}};

  ojson stages = ojson::array();
  for (const auto& s : r.stages) {
    ojson o;
    o["index"] = s.index;
    o["k"] = s.k;
    o["eps"] = s.eps;
    o["lambda"] = s.lambda;
    o["energy_k"] = num(s.energy_k);
    o["warm_energy_k"] = num(s.warm_energy_k);
    o["stationarity"] = num(s.stationarity);
    o["iterations"] = s.iterations;
    o["status"] = to_string(s.status);
    o["grad_l1"] = num(s.grad_l1);
    o["coercivity_bound"] = num(s.coercivity_bound);
    o["max_flux"] = num(s.max_flux);
    o["change_l1"] = num(s.change_l1);
    o["u"] = detail::field_json(s.u);
    o["sigma"] = detail::field_json(s.sigma);
    stages.push_back(std::move(o));
  }
  j["stages"] = std::move(stages);

  ojson chain = ojson::array();
  for (double v : r.energy_chain) chain.push_back(num(v));
  j["final"] = {{"energy", num(r.final_energy)},
                {"primal_integral", num(r.primal_integral)},
                {"dual_integral", num(r.dual_integral)},
                {"pairing_integral", num(r.pairing_integral)},
                {"fenchel_integrated_residual", num(r.fenchel_integrated)},
                {"energy_chain", chain},
                {"energy_chain_ok", r.energy_chain_ok()},
                {"u", detail::field_json(r.u)},
                {"sigma", detail::field_json(r.sigma)}};

  ojson dis = ojson::array();
  for (const auto& d : r.dis_var)
    dis.push_back({{"stage", d.stage},
                   {"w", d.w},
                   {"pairing", num(d.pairing)},
                   {"c", num(d.c)},
                   {"eps", d.eps},
                   {"margin", num(d.margin)},
                   {"passed", d.passed}});
  ojson dual_rows = ojson::array();
  for (const auto& d : r.dual.rows)
    dual_rows.push_back({{"stage", d.stage},
                         {"lhs", num(d.lhs)},
                         {"rhs", num(d.rhs)},
                         {"infinite_cells", d.infinite_cells},
                         {"passed", d.passed}});
  ojson vi = ojson::array();
  for (const auto& v : r.vi)
    vi.push_back({{"eta", v.eta},
                  {"m", num(v.m)},
                  {"grad_l1", num(v.grad_l1)},
                  {"off_contact", v.off_contact},
                  {"passed", v.passed}});
  ojson residual = ojson::array();
  for (double v : r.fenchel.residual) residual.push_back(num(v));
  ojson fractions = ojson::array();
  for (const auto& row : r.sigma_table.fractions) fractions.push_back(row);

  j["diagnostics"] = {
      {"dis_var", dis},
      {"dual_bound",
       {{"t", r.dual.t},
        {"comparison_integral", num(r.dual.comparison_integral)},
        {"rows", dual_rows},
        {"final_lhs", num(r.dual.final_lhs)},
        {"liminf_lhs", num(r.dual.liminf_lhs)},
        {"fatou_passed", r.dual.fatou_passed},
        {"passed", r.dual.passed()}}},
      {"vi", vi},
      {"fenchel",
       {{"max_abs", num(r.fenchel.max_abs)},
        {"l1", num(r.fenchel.l1)},
        {"chain_cells", r.fenchel.chain_cells},
        {"chain_violations", r.fenchel.chain_violations},
        {"chain_worst_margin", num(r.fenchel.chain_worst_margin)},
        {"passed", r.fenchel.passed},
        {"residual", residual}}},
      {"sigma_convergence",
       {{"thresholds", r.sigma_table.thresholds},
        {"fractions", fractions},
        {"l1", r.sigma_table.l1},
        {"nonincreasing_last3", r.sigma_table.nonincreasing_last3}}}};
  return j;
}

}  // namespace fenchelkit
