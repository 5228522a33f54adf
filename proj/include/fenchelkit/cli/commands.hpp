#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fenchelkit/cli/config.hpp"
#include "fenchelkit/discretize/field_io.hpp"
#include "fenchelkit/extension/certificate.hpp"
#include "fenchelkit/legendre/certificates.hpp"
#include "fenchelkit/solver/report_json.hpp"
#include "fenchelkit/solver/scheme.hpp"

namespace fenchelkit::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kDiagnosticsFailed = 1, kConfigError = 2, kNonConverged = 3 };

inline constexpr const char* kCertifyReportSchema = "fenchelkit.certify_report/1";

struct CommandOptions {
  std::string config;   // --config
  std::string out;      // --out; empty writes to the current directory (conjugate: stdout)
  std::optional<double> k;
  bool quiet = false;
  std::string x;        // conjugate: evaluation point "a" or "a,b"
  std::string queries;  // conjugate: query file
  std::string report;   // diagnose: report file
  std::string what = "all";
  std::optional<std::string> generated_at;  // fixed timestamp, for tests
  std::ostream* out_stream = &std::cout;
  std::ostream* err_stream = &std::cerr;
};

inline const std::vector<std::string>& diagnose_selectors() {
  static const std::vector<std::string> s{"stages", "dis_var", "dual", "vi", "fenchel", "sigma", "all"};
  return s;
}

namespace detail {

inline std::string read_file(const std::string& path, const char* what) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(std::string("cannot read ") + what + " '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline ProblemConfig load_config(const CommandOptions& opt) {
  if (opt.config.empty()) throw ConfigError("--config is required");
  try {
    return parse_config(read_file(opt.config, "config"));
  } catch (const ConfigError& e) {
    throw ConfigError(opt.config + ": " + e.message(), e.line());
  }
}

inline std::filesystem::path out_dir(const CommandOptions& opt) {
  std::filesystem::path dir = opt.out.empty() ? std::filesystem::path(".") : std::filesystem::path(opt.out);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<double> parse_coords(const std::string& text) {
  std::string s = text;
  for (char& c : s)
    if (c == ',' || c == ';' || c == '\t') c = ' ';
  std::istringstream is(s);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ValidationError("not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

inline Vec2N to_point(const std::vector<double>& c, int n) {
  if (static_cast<int>(c.size()) != n)
    throw ValidationError("expected " + std::to_string(n) + " coordinate(s), got " + std::to_string(c.size()));
  return n == 1 ? Vec2N(c[0]) : Vec2N(c[0], c[1]);
}

/// %.17g, which reproduces a double exactly.
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string cell(const nlohmann::json& v) {
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return g17(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  return v.dump();
}

inline void table(std::ostream& os, const nlohmann::json& rows, const std::vector<std::string>& cols) {
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "\t" : "") << cols[c];
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "\t" : "") << cell(r.value(cols[c], nlohmann::json()));
    os << "\n";
  }
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  os << s;
}

template <class Writer>
void write_with(const std::filesystem::path& p, Writer w, bool binary) {
  std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  w(os);
}

}  // namespace detail

/// F*(x, z) at query points, one per line of the query file. With --k the
/// conjugate of F_k is reported instead: F* on the closed ball B_k and +inf
/// outside it. Infinite rows carry the flag INF.
inline int cmd_conjugate(const CommandOptions& opt) {
  std::ostream& err = *opt.err_stream;
  try {
    const ProblemConfig cfg = detail::load_config(opt);
    const int n = cfg.n;
    const EnergyDensity F = cfg.energy();
    const auto conj = conjugate_analytic(F);
    Vec2N x = n == 1 ? Vec2N(0.5) : Vec2N(0.5, 0.5);
    if (!opt.x.empty()) {
      try {
        x = detail::to_point(detail::parse_coords(opt.x), n);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("--x: ") + e.what());
      }
    }
    if (opt.k && !(*opt.k > 0.0)) throw ConfigError("--k must be positive");
    if (opt.queries.empty()) throw ConfigError("--queries is required");
    const std::string text = detail::read_file(opt.queries, "query file");

    std::ostringstream csv;
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(lines, line)) {
      ++lineno;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      Vec2N z;
      try {
        z = detail::to_point(detail::parse_coords(line), n);
      } catch (const std::exception& e) {
        throw ConfigError(opt.queries + ": " + e.what(), lineno);
      }
      if (!header) {
        csv << (n == 1 ? "z1" : "z1,z2") << ",value,flag\n";
        header = true;
      }
      ExtReal v = conj(x, z);
      if (opt.k && norm(z) > *opt.k) v = ExtReal::infinity();
      for (int a = 0; a < n; ++a) csv << detail::g17(z[a]) << ",";
      if (v.is_finite())
        csv << detail::g17(v.value()) << ",FINITE\n";
      else
        csv << "inf,INF\n";
    }
    if (opt.out.empty()) {
      *opt.out_stream << csv.str();
    } else {
      const auto dir = detail::out_dir(opt);
      detail::write_text(dir / "conjugate.csv", csv.str());
      if (!opt.quiet) *opt.out_stream << "wrote " << (dir / "conjugate.csv").string() << "\n";
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDiagnosticsFailed;
  }
}

/// Extension certificate, F_k* certificate and the superlinear duality
/// probe at the given k. Writes certify_report.json.
inline int cmd_certify(const CommandOptions& opt) {
  std::ostream& err = *opt.err_stream;
  try {
    const ProblemConfig cfg = detail::load_config(opt);
    if (!opt.k) throw ConfigError("--k is required for certify");
    const double k = *opt.k;
    if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("--k must be positive and finite");
    const EnergyDensity F = cfg.energy();
    const auto conj = conjugate_analytic(F);

    std::vector<Report> reports;
    ExtensionSampleSpec spec = cfg.certify.extension;
    spec.n = cfg.n;
    reports.push_back(extension_certificate(F, k, spec));
    FkStarOptions fo;
    fo.n = cfg.n;
    reports.push_back(fk_star_certificate(RestrictedConjugate(F, conj, k), cfg.certify.fk_star_samples, fo));
    DualProbeOptions dopt;
    dopt.n = cfg.n;
    dopt.points = cfg.certify.probe_points;
    reports.push_back(superlinear_dual_probe(F, conj, {1.0, 2.0, 4.0, k}, dopt));

    bool passed = true;
    nlohmann::ordered_json j;
    j["generated_at"] = opt.generated_at ? *opt.generated_at : fenchelkit::detail::utc_now();
    j["schema"] = kCertifyReportSchema;
    j["energy"] = describe(F);
    j["n"] = cfg.n;
    j["k"] = k;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Report& r : reports) {
      passed = passed && r.passed();
      arr.push_back(to_json(r));
    }
    j["status"] = passed ? "PASS" : "FAIL";
    j["reports"] = arr;
    const auto dir = detail::out_dir(opt);
    detail::write_text(dir / "certify_report.json", j.dump(2) + "\n");
    if (!opt.quiet) {
      std::ostream& os = *opt.out_stream;
      os << describe(F) << " k=" << detail::g17(k) << "\n";
      for (const Report& r : reports)
        for (const auto& c : r.checks)
          os << "  " << r.name << "/" << c.name << "\t" << (c.passed ? "PASS" : "FAIL") << "\tworst_margin="
             << detail::g17(c.worst_margin) << "\tsamples=" << c.samples << "\n";
      os << (passed ? "PASS" : "FAIL") << "\n";
    }
    return passed ? kOk : kDiagnosticsFailed;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDiagnosticsFailed;
  }
}

/// Runs the scheme and every diagnostic. Writes solve_report.json and the
/// final u and sigma as CSV and/or binary dumps.
inline int cmd_solve(const CommandOptions& opt) {
  std::ostream& err = *opt.err_stream;
  std::ostream& os = *opt.out_stream;
  try {
    const ProblemConfig cfg = detail::load_config(opt);
    const Problem P = cfg.problem();
    RunOptions ro;
    if (!opt.quiet)
      ro.on_stage = [&](const StageRecord& s) {
        os << "stage " << s.index << " k=" << detail::g17(s.k) << " energy_k=" << detail::g17(s.energy_k)
           << " iterations=" << s.iterations << " " << to_string(s.status) << "\n";
      };
    SolveReport rep;
    try {
      rep = run_scheme(P, cfg.schedule, ro);
    } catch (const SchemeAbort& e) {
      err << "scheme aborted: " << e.what() << "\n";
      return kDiagnosticsFailed;
    }
    const auto dir = detail::out_dir(opt);
    const auto j = opt.generated_at ? to_json(rep, *opt.generated_at) : to_json(rep);
    detail::write_text(dir / "solve_report.json", j.dump(2) + "\n");
    if (cfg.fields == "csv" || cfg.fields == "both") {
      detail::write_with(dir / "u.csv", [&](std::ostream& s) { write_csv(s, rep.u); }, false);
      detail::write_with(dir / "sigma.csv", [&](std::ostream& s) { write_csv(s, rep.sigma); }, false);
    }
    if (cfg.fields == "binary" || cfg.fields == "both") {
      detail::write_with(dir / "u.bin", [&](std::ostream& s) { write_binary(s, rep.u); }, true);
      detail::write_with(dir / "sigma.bin", [&](std::ostream& s) { write_binary(s, rep.sigma); }, true);
    }
    if (!opt.quiet) {
      os << "final energy " << detail::g17(rep.final_energy) << "\n";
      os << "outer: " << (rep.outer_converged ? "converged" : "not converged") << " (" << rep.outer_reason << ")\n";
      os << "diagnostics: " << (rep.diagnostics_passed() ? "PASS" : "FAIL") << "\n";
    }
    if (!rep.converged()) return kNonConverged;
    return rep.diagnostics_passed() ? kOk : kDiagnosticsFailed;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDiagnosticsFailed;
  }
}

/// Prints tables from a stored solve report without recomputing anything.
inline int cmd_diagnose(const CommandOptions& opt) {
  std::ostream& err = *opt.err_stream;
  std::ostream& os = *opt.out_stream;
  const auto& sel = diagnose_selectors();
  if (std::find(sel.begin(), sel.end(), opt.what) == sel.end()) {
    err << "unknown selector '" << opt.what << "'; valid selectors:";
    for (const auto& s : sel) err << " " << s;
    err << "\n";
    return kConfigError;
  }
  nlohmann::json j;
  try {
    if (opt.report.empty()) throw ConfigError("--report is required");
    j = nlohmann::json::parse(detail::read_file(opt.report, "report"));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  if (!j.is_object() || j.value("schema", "") != kSolveReportSchema) {
    err << "schema mismatch: expected " << kSolveReportSchema << ", got "
        << (j.is_object() && j.contains("schema") ? j["schema"].dump() : "none") << "\n";
    return kConfigError;
  }
  try {
    const bool all = opt.what == "all";
    const auto& d = j.at("diagnostics");
    auto heading = [&](const char* name) { os << "== " << name << " ==\n"; };
    if (all || opt.what == "stages") {
      heading("stages");
      detail::table(os, j.at("stages"),
                    {"index", "k", "eps", "energy_k", "stationarity", "iterations", "status", "grad_l1", "max_flux",
                     "change_l1"});
      const auto& st = j.at("status");
      os << "outer_converged\t" << detail::cell(st.at("outer_converged")) << "\t" << detail::cell(st.at("outer_reason"))
         << "\n";
      os << "final_energy\t" << detail::cell(j.at("final").at("energy")) << "\n";
    }
    if (all || opt.what == "dis_var") {
      heading("dis_var");
      detail::table(os, d.at("dis_var"), {"stage", "w", "pairing", "c", "eps", "margin", "passed"});
    }
    if (all || opt.what == "dual") {
      heading("dual");
      const auto& db = d.at("dual_bound");
      detail::table(os, db.at("rows"), {"stage", "lhs", "rhs", "infinite_cells", "passed"});
      for (const char* key : {"t", "comparison_integral", "final_lhs", "liminf_lhs", "fatou_passed", "passed"})
        os << key << "\t" << detail::cell(db.at(key)) << "\n";
    }
    if (all || opt.what == "vi") {
      heading("vi");
      detail::table(os, d.at("vi"), {"eta", "m", "grad_l1", "off_contact", "passed"});
    }
    if (all || opt.what == "fenchel") {
      heading("fenchel");
      const auto& f = d.at("fenchel");
      for (const char* key : {"max_abs", "l1", "chain_cells", "chain_violations", "chain_worst_margin", "passed"})
        os << key << "\t" << detail::cell(f.at(key)) << "\n";
      os << "integrated_residual\t" << detail::cell(j.at("final").at("fenchel_integrated_residual")) << "\n";
    }
    if (all || opt.what == "sigma") {
      heading("sigma");
      const auto& s = d.at("sigma_convergence");
      os << "stage";
      for (const auto& t : s.at("thresholds")) os << "\tfrac>" << detail::cell(t);
      os << "\tl1\n";
      const auto& fr = s.at("fractions");
      const auto& l1 = s.at("l1");
      for (std::size_t i = 0; i < fr.size(); ++i) {
        os << i;
        for (const auto& v : fr[i]) os << "\t" << detail::cell(v);
        os << "\t" << (i < l1.size() ? detail::cell(l1[i]) : "-") << "\n";
      }
      os << "nonincreasing_last3\t" << detail::cell(s.at("nonincreasing_last3")) << "\n";
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "malformed report: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace fenchelkit::cli
