#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minsurf/analysis.hpp"
#include "minsurf/report.hpp"

namespace minsurf {

struct RunConfig {
  std::string command;
  std::string surface = "holo_graph";
  ParamMap params;
  std::optional<int> k;
  std::optional<double> tmax;
  std::vector<int> resolutions = {33, 65, 129};
  std::string jet = "analytic";  // analytic | fd:H
  std::string synthetic;         // holonomy only: replaces the surface by a synthetic connection
  std::string jn = "search";     // search | catalog
  std::filesystem::path out = "minsurf-out";
  std::string format = "json";   // json | csv | both
  double metric_tol = 1e-8;
  double solver_tol = 1e-9;
  double identity_tol = 1e-10;
  double null_tol = 1e-6;
  std::uint64_t seed = 20240611;
};

// Applies "key = value" lines; '#' starts a comment.  Keys: surface, param.NAME, k, tmax,
// res, jet, synthetic, jn, out, format, metric_tol, solver_tol, identity_tol, null_tol, seed.
void apply_config_text(RunConfig& config, const std::string& text);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

std::vector<int> parse_resolution_list(const std::string& text);
JetSpec parse_jet(const std::string& text);

// Catalog patch selected by the config, with k and tmax folded into the parameters.
ImmersionPatch config_patch(const RunConfig& config);
AnalysisOptions config_options(const RunConfig& config);

// Everything that determines the report body.
Json config_to_json(const RunConfig& config);

struct CommandOutcome {
  Json report;
  std::vector<std::pair<std::string, std::string>> csv_files;  // file name, contents
  bool pass = false;
};

CommandOutcome run_command(const RunConfig& config);

CommandOutcome cmd_analyze(const RunConfig& config);
CommandOutcome cmd_convergence(const RunConfig& config);
CommandOutcome cmd_spectrum(const RunConfig& config);
CommandOutcome cmd_holonomy(const RunConfig& config);
CommandOutcome cmd_catalog(const RunConfig& config);

// Check tables; order checks are added only with two or more resolutions.
std::vector<Check> identity_checks(const ImmersionPatch& patch, const RunConfig& config,
                                   const std::vector<ResolutionAnalysis>& runs);
std::vector<Check> spectrum_checks(const ImmersionPatch& patch, const RunConfig& config,
                                   const std::vector<ResolutionAnalysis>& runs);

// Writes report.json and/or the CSV files into config.out according to config.format.
void write_outcome(const RunConfig& config, const CommandOutcome& outcome);

}  // namespace minsurf
