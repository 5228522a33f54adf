#include <CLI11.hpp>

#include "fenchelkit/cli/commands.hpp"

namespace cli = fenchelkit::cli;

int main(int argc, char** argv) {
  CLI::App app{"fenchelkit: conjugates, restricted extensions and the almost-minimizer scheme"};
  app.require_subcommand(1);
  cli::CommandOptions opt;
  double k = 0.0;

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config, "problem config (JSON)");
    if (needs_config) c->required();
    sub->add_option("--out", opt.out, "output directory");
    sub->add_flag("--quiet", opt.quiet, "suppress progress output");
  };

  auto* conj = app.add_subcommand("conjugate", "evaluate F*(x, z) at query points");
  common(conj, true);
  conj->add_option("--x", opt.x, "point x, e.g. 0.5 or 0.5,0.25 (default: domain center)");
  conj->add_option("--queries", opt.queries, "file with one query point z per line")->required();
  conj->add_option("--k", k, "report the conjugate of F_k instead");

  auto* cert = app.add_subcommand("certify", "run the extension and duality certificates at k");
  common(cert, true);
  cert->add_option("--k", k, "truncation level k")->required();

  auto* solve = app.add_subcommand("solve", "run the almost-minimizer scheme with diagnostics");
  common(solve, true);

  auto* diag = app.add_subcommand("diagnose", "print tables from a stored solve report");
  diag->add_option("--report", opt.report, "solve_report.json")->required();
  diag->add_option("--what", opt.what, "stages | dis_var | dual | vi | fenchel | sigma | all");
  diag->add_flag("--quiet", opt.quiet, "accepted for symmetry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kConfigError;
  }
  if (conj->parsed() && conj->count("--k")) opt.k = k;
  if (cert->parsed()) opt.k = k;

  if (conj->parsed()) return cli::cmd_conjugate(opt);
  if (cert->parsed()) return cli::cmd_certify(opt);
  if (solve->parsed()) return cli::cmd_solve(opt);
  return cli::cmd_diagnose(opt);
}
