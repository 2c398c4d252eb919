#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minsurf/error.hpp"
#include "minsurf/lab.hpp"

namespace {

void print_summary(const minsurf::CommandOutcome& outcome) {
  const auto& checks = outcome.report["checks"];
  for (const auto& c : checks) {
    std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>();
    if (c.contains("note")) std::cout << "  (" << c["note"].get<std::string>() << ")";
    std::cout << '\n';
  }
  const auto& s = outcome.report["summary"];
  std::cout << s["passed"].get<int>() << "/" << s["checks"].get<int>() << " checks passed\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for minimal surfaces with a parallel normal complex structure"};
  app.require_subcommand(1, 1);

  std::optional<std::string> surface, k, tmax, res, jet, out, format, synthetic, jn, config_file;
  std::vector<std::string> params;
  std::optional<std::string> metric_tol, solver_tol, identity_tol, null_tol, seed;
  bool quiet = false;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analyze", "identity suite at each resolution"},
      {"spectrum", "smallest eigenvalue of the second variation on the patch"},
      {"holonomy", "search for a parallel normal complex structure"},
      {"convergence", "residual-vs-h table and fitted orders"},
      {"catalog", "list the built-in surfaces"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--surface", surface, "catalog surface name");
    sub->add_option("--param", params, "surface parameter K=V (repeatable)");
    sub->add_option("--k", k, "number of complex graph coordinates / codimension half");
    sub->add_option("--tmax", tmax, "catenoid half-height");
    sub->add_option("--res", res, "comma-separated grid resolutions");
    sub->add_option("--jet", jet, "analytic or fd:H");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--format", format, "json, csv or both");
    sub->add_option("--synthetic", synthetic, "synthetic connection instead of a surface (so4)");
    sub->add_option("--jn", jn, "search or catalog");
    sub->add_option("--config", config_file, "key = value config file; flags win");
    sub->add_option("--metric-tol", metric_tol);
    sub->add_option("--solver-tol", solver_tol);
    sub->add_option("--identity-tol", identity_tol);
    sub->add_option("--null-tol", null_tol);
    sub->add_option("--seed", seed);
    sub->add_flag("--quiet", quiet, "suppress the check summary");
  }

  CLI11_PARSE(app, argc, argv);

  minsurf::RunConfig config;
  try {
    config.command = app.get_subcommands().front()->get_name();
    if (config_file) minsurf::apply_config_file(config, *config_file);
    auto set = [&](const char* key, const std::optional<std::string>& v) {
      if (v) minsurf::apply_config_entry(config, key, *v);
    };
    set("surface", surface);
    set("k", k);
    set("tmax", tmax);
    set("res", res);
    set("jet", jet);
    set("out", out);
    set("format", format);
    set("synthetic", synthetic);
    set("jn", jn);
    set("metric_tol", metric_tol);
    set("solver_tol", solver_tol);
    set("identity_tol", identity_tol);
    set("null_tol", null_tol);
    set("seed", seed);
    for (const std::string& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0) throw minsurf::BadParams("--param expects K=V, got '" + p + "'");
      minsurf::apply_config_entry(config, "param." + p.substr(0, eq), p.substr(eq + 1));
    }
  } catch (const minsurf::Error& e) {
    std::cerr << "minsurf-lab: " << e.what() << '\n';
    return 2;
  }

  try {
    const minsurf::CommandOutcome outcome = minsurf::run_command(config);
    minsurf::write_outcome(config, outcome);
    if (!quiet) print_summary(outcome);
    return outcome.pass ? 0 : 1;
  } catch (const minsurf::Error& e) {
    std::cerr << "minsurf-lab: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "minsurf-lab: " << e.what() << '\n';
    return 2;
  }
}
