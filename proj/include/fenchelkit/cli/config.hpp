#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fenchelkit/core/energy.hpp"
#include "fenchelkit/core/errors.hpp"
#include "fenchelkit/discretize/constraint.hpp"
#include "fenchelkit/extension/certificate.hpp"
#include "fenchelkit/solver/problem.hpp"
#include "fenchelkit/solver/schedule.hpp"

namespace fenchelkit {

inline constexpr const char* kConfigSchema = "fenchelkit.config/1";

/// A scalar given in a config as a number or an expression in x1, x2.
struct ScalarSpec {
  std::optional<double> constant;
  std::string expression;

  ScalarField field(const Grid& g) const {
    if (constant) return ScalarField(g, *constant);
    return ScalarField::from_expression(g, Expression::parse(expression));
  }
  std::string text() const { return constant ? std::to_string(*constant) : expression; }
};

struct CertifySpec {
  ExtensionSampleSpec extension;
  std::size_t fk_star_samples = 32;
  std::size_t probe_points = 9;
};

/// A parsed and validated problem config document.
struct ProblemConfig {
  std::string energy_name;
  ParamMap params;
  std::map<std::string, ScalarSpec> coefficients;
  int n = 1;
  int N = 64;
  ConstraintKind kind = ConstraintKind::unconstrained;
  ScalarSpec boundary;
  std::optional<ScalarSpec> obstacle;
  Schedule schedule = Schedule::geometric();
  std::optional<ScalarSpec> w0;  // nullopt = auto
  double t = 2.0;
  Tolerances tol;
  CertifySpec certify;
  std::string fields = "csv";  // csv | binary | both
  std::uint64_t seed = 1;
  double corrupt_derivative = 1.0;

  Grid grid() const { return Grid(n, N); }

  EnergyDensity energy() const {
    CoefficientMap cm;
    for (const auto& [k, s] : coefficients)
      cm[k] = s.constant ? CoefficientField::constant(*s.constant) : CoefficientField::expression(s.expression, n);
    EnergyDensity F = make_energy(energy_name, params, cm);
    return corrupt_derivative != 1.0 ? F.with_corrupted_derivative(corrupt_derivative) : F;
  }

  ConstraintSet constraint() const {
    const Grid g = grid();
    const ScalarField u0 = boundary.field(g);
    if (kind == ConstraintKind::unconstrained) return ConstraintSet::unconstrained(u0);
    return ConstraintSet::with_obstacle(u0, obstacle->field(g));
  }

  Problem problem() const {
    const Grid g = grid();
    std::optional<ScalarField> w;
    if (w0) w = w0->field(g);
    Problem P = make_problem(g, energy(), constraint(), w, t, tol);
    P.seed = seed;
    return P;
  }
};

namespace detail {

using json = nlohmann::json;

/// 1-based line of the byte offset in text.
inline int line_of(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

/// Line of the key reached by following `path` through the text: each
/// component is searched for as a quoted key after the previous one.
inline int locate(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  int line = 0;
  for (const std::string& key : path) {
    const std::string quoted = "\"" + key + "\"";
    std::size_t at = pos;
    while (true) {
      at = text.find(quoted, at);
      if (at == std::string::npos) return line;
      std::size_t after = at + quoted.size();
      while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
      if (after < text.size() && text[after] == ':') break;
      at += quoted.size();
    }
    pos = at + quoted.size();
    line = line_of(text, at);
  }
  return line;
}

class ConfigReader {
 public:
  explicit ConfigReader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
    std::string where;
    for (const auto& p : path) where += (where.empty() ? "" : ".") + p;
    throw ConfigError(where.empty() ? msg : where + ": " + msg, locate(text_, path));
  }

  const json& object(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_object()) fail(path, "expected an object");
    return j;
  }

  void only_keys(const json& j, const std::vector<std::string>& path, const std::set<std::string>& allowed) const {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!allowed.count(it.key())) {
        auto p = path;
        p.push_back(it.key());
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        fail(p, "unknown key (allowed: " + list + ")");
      }
  }

  double number(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
  }

  double positive(const json& j, const std::vector<std::string>& path) const {
    const double v = number(j, path);
    if (!(v > 0.0)) fail(path, "must be positive");
    return v;
  }

  long integer(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long>();
  }

  std::string string(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  ScalarSpec scalar(const json& j, const std::vector<std::string>& path, int n) const {
    ScalarSpec s;
    if (j.is_number()) {
      s.constant = number(j, path);
      return s;
    }
    s.expression = string(j, path);
    try {
      const Expression e = Expression::parse(s.expression);
      if (n == 1 && s.expression.find("x2") != std::string::npos) fail(path, "x2 is not available in 1D");
      (void)e;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      fail(path, std::string("bad expression: ") + ex.what());
    }
    return s;
  }

  std::vector<double> numbers(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number(v, path));
    return out;
  }

 private:
  const std::string& text_;
};

}  // namespace detail

/// Parses and validates a config document. Every error, including cross-
/// field checks (q > p, t > 1, obstacle below the boundary data), is a
/// ConfigError carrying the line of the offending key.
inline ProblemConfig parse_config(const std::string& text) {
  using detail::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), detail::line_of(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  const detail::ConfigReader r(text);
  ProblemConfig c;
  r.object(j, {});
  r.only_keys(j, {}, {"schema", "energy", "grid", "constraint", "schedule", "comparison", "tolerances", "certify",
                      "output", "seed", "test_hooks"});
  if (j.contains("schema") && r.string(j["schema"], {"schema"}) != kConfigSchema)
    r.fail({"schema"}, std::string("unsupported schema (expected ") + kConfigSchema + ")");

  if (!j.contains("grid")) r.fail({}, "missing required key 'grid'");
  const json& grid = r.object(j["grid"], {"grid"});
  r.only_keys(grid, {"grid"}, {"n", "N"});
  if (!grid.contains("n") || !grid.contains("N")) r.fail({"grid"}, "needs n and N");
  c.n = static_cast<int>(r.integer(grid["n"], {"grid", "n"}));
  if (c.n != 1 && c.n != 2) r.fail({"grid", "n"}, "dimension must be 1 or 2");
  c.N = static_cast<int>(r.integer(grid["N"], {"grid", "N"}));
  if (c.N < 4) r.fail({"grid", "N"}, "need N >= 4");

  if (!j.contains("energy")) r.fail({}, "missing required key 'energy'");
  const json& en = r.object(j["energy"], {"energy"});
  r.only_keys(en, {"energy"}, {"name", "params", "coefficients"});
  if (!en.contains("name")) r.fail({"energy"}, "missing 'name'");
  c.energy_name = r.string(en["name"], {"energy", "name"});
  if (!energy_names().count(c.energy_name)) {
    std::string list;
    for (const auto& n : energy_names()) list += (list.empty() ? "" : ", ") + n;
    r.fail({"energy", "name"}, "unknown energy '" + c.energy_name + "' (known: " + list + ")");
  }
  if (en.contains("params")) {
    r.object(en["params"], {"energy", "params"});
    for (auto it = en["params"].begin(); it != en["params"].end(); ++it)
      c.params[it.key()] = r.number(it.value(), {"energy", "params", it.key()});
  }
  if (en.contains("coefficients")) {
    r.object(en["coefficients"], {"energy", "coefficients"});
    for (auto it = en["coefficients"].begin(); it != en["coefficients"].end(); ++it)
      c.coefficients[it.key()] = r.scalar(it.value(), {"energy", "coefficients", it.key()}, c.n);
  }
  try {
    (void)c.energy();
  } catch (const std::exception& e) {
    r.fail({"energy"}, e.what());
  }

  if (j.contains("constraint")) {
    const json& cs = r.object(j["constraint"], {"constraint"});
    r.only_keys(cs, {"constraint"}, {"kind", "boundary", "obstacle"});
    const std::string kind = cs.contains("kind") ? r.string(cs["kind"], {"constraint", "kind"}) : "unconstrained";
    if (kind == "obstacle")
      c.kind = ConstraintKind::obstacle;
    else if (kind != "unconstrained")
      r.fail({"constraint", "kind"}, "must be 'unconstrained' or 'obstacle'");
    c.boundary = cs.contains("boundary") ? r.scalar(cs["boundary"], {"constraint", "boundary"}, c.n) : ScalarSpec{0.0, ""};
    if (c.kind == ConstraintKind::obstacle) {
      if (!cs.contains("obstacle")) r.fail({"constraint", "kind"}, "obstacle kind needs an 'obstacle' entry");
      c.obstacle = r.scalar(cs["obstacle"], {"constraint", "obstacle"}, c.n);
    } else if (cs.contains("obstacle")) {
      r.fail({"constraint", "obstacle"}, "only allowed with kind 'obstacle'");
    }
  } else {
    c.boundary = ScalarSpec{0.0, ""};
  }
  try {
    (void)c.constraint();
  } catch (const std::exception& e) {
    r.fail({"constraint", c.obstacle ? "obstacle" : "boundary"}, e.what());
  }

  if (j.contains("schedule")) {
    const json& s = r.object(j["schedule"], {"schedule"});
    r.only_keys(s, {"schedule"}, {"k", "k0", "growth", "J", "eps", "eps0", "min_stages"});
    Schedule sc;
    if (s.contains("k")) {
      if (s.contains("k0") || s.contains("growth") || s.contains("J"))
        r.fail({"schedule", "k"}, "give either a k list or k0/growth/J, not both");
      sc.k_values = r.numbers(s["k"], {"schedule", "k"});
    } else {
      const double k0 = s.contains("k0") ? r.positive(s["k0"], {"schedule", "k0"}) : 1.0;
      const double growth = s.contains("growth") ? r.number(s["growth"], {"schedule", "growth"}) : 2.0;
      if (!(growth > 1.0)) r.fail({"schedule", "growth"}, "must be > 1");
      const long J = s.contains("J") ? r.integer(s["J"], {"schedule", "J"}) : 20;
      if (J < 0 || J > 60) r.fail({"schedule", "J"}, "must be in [0, 60]");
      for (long i = 0; i <= J; ++i) sc.k_values.push_back(k0 * std::pow(growth, static_cast<double>(i)));
    }
    if (s.contains("eps")) {
      if (s.contains("eps0")) r.fail({"schedule", "eps"}, "give either an eps list or eps0, not both");
      sc.eps_values = r.numbers(s["eps"], {"schedule", "eps"});
    } else {
      const double eps0 = s.contains("eps0") ? r.positive(s["eps0"], {"schedule", "eps0"}) : 1e-6;
      for (std::size_t i = 0; i < sc.k_values.size(); ++i)
        sc.eps_values.push_back(eps0 * std::ldexp(1.0, -static_cast<int>(i)));
    }
    if (s.contains("min_stages")) sc.min_stages = static_cast<int>(r.integer(s["min_stages"], {"schedule", "min_stages"}));
    try {
      sc.validate();
    } catch (const std::exception& e) {
      r.fail({"schedule"}, e.what());
    }
    c.schedule = sc;
  }

  if (j.contains("comparison")) {
    const json& cmp = r.object(j["comparison"], {"comparison"});
    r.only_keys(cmp, {"comparison"}, {"w0", "t"});
    if (cmp.contains("t")) {
      c.t = r.number(cmp["t"], {"comparison", "t"});
      if (!(c.t > 1.0)) r.fail({"comparison", "t"}, "t must be > 1");
    }
    if (cmp.contains("w0") && !(cmp["w0"].is_string() && cmp["w0"] == "auto"))
      c.w0 = r.scalar(cmp["w0"], {"comparison", "w0"}, c.n);
  }

  if (j.contains("tolerances")) {
    const json& t = r.object(j["tolerances"], {"tolerances"});
    r.only_keys(t, {"tolerances"}, {"stat", "vi", "el", "outer", "fenchel", "dual", "max_iterations"});
    auto pos = [&](const char* key, double& out) {
      if (t.contains(key)) out = r.positive(t[key], {"tolerances", key});
    };
    pos("stat", c.tol.stat);
    pos("vi", c.tol.vi);
    pos("el", c.tol.el);
    pos("outer", c.tol.outer);
    pos("fenchel", c.tol.fenchel);
    pos("dual", c.tol.dual);
    if (t.contains("max_iterations")) {
      const long m = r.integer(t["max_iterations"], {"tolerances", "max_iterations"});
      if (m < 1) r.fail({"tolerances", "max_iterations"}, "must be >= 1");
      c.tol.max_iterations = static_cast<int>(m);
    }
  }

  c.certify.extension.n = c.n;
  if (j.contains("certify")) {
    const json& ce = r.object(j["certify"], {"certify"});
    r.only_keys(ce, {"certify"},
                {"points", "lipschitz_pairs", "inverse_points", "exhaustion_points", "injectivity", "fk_star_samples",
                 "probe_points"});
    auto count = [&](const char* key, std::size_t& out) {
      if (!ce.contains(key)) return;
      const long v = r.integer(ce[key], {"certify", key});
      if (v < 1) r.fail({"certify", key}, "must be >= 1");
      out = static_cast<std::size_t>(v);
    };
    count("points", c.certify.extension.points);
    count("lipschitz_pairs", c.certify.extension.lipschitz_pairs);
    count("inverse_points", c.certify.extension.inverse_points);
    count("exhaustion_points", c.certify.extension.exhaustion_points);
    count("fk_star_samples", c.certify.fk_star_samples);
    count("probe_points", c.certify.probe_points);
    if (ce.contains("injectivity")) {
      if (!ce["injectivity"].is_boolean()) r.fail({"certify", "injectivity"}, "expected true or false");
      c.certify.extension.injectivity = ce["injectivity"].get<bool>();
    }
  }

  if (j.contains("output")) {
    const json& o = r.object(j["output"], {"output"});
    r.only_keys(o, {"output"}, {"fields"});
    if (o.contains("fields")) {
      c.fields = r.string(o["fields"], {"output", "fields"});
      if (c.fields != "csv" && c.fields != "binary" && c.fields != "both")
        r.fail({"output", "fields"}, "must be 'csv', 'binary' or 'both'");
    }
  }
  if (j.contains("seed")) {
    const long s = r.integer(j["seed"], {"seed"});
    if (s < 0) r.fail({"seed"}, "must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("test_hooks")) {
    const json& h = r.object(j["test_hooks"], {"test_hooks"});
    r.only_keys(h, {"test_hooks"}, {"corrupt_derivative"});
    if (h.contains("corrupt_derivative")) c.corrupt_derivative = r.positive(h["corrupt_derivative"], {"test_hooks", "corrupt_derivative"});
  }

  // the comparison function must lie in K
  try {
    (void)c.problem();
  } catch (const std::exception& e) {
    r.fail({"comparison"}, e.what());
  }
  return c;
}

}  // namespace fenchelkit
