#include "minsurf/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "minsurf/convergence.hpp"
#include "minsurf/error.hpp"
#include "minsurf/parallel.hpp"

namespace minsurf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) throw BadParams(key + " expects a number, got '" + value + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) throw BadParams(key + " expects an integer, got '" + value + "'");
  return x;
}

Json matrix_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct ReportBuilder {
  Json report;
  std::vector<Check> checks;
  std::string started = utc_now();

  ReportBuilder(const RunConfig& config) {
    report["schema"] = kReportSchema;
    report["version"] = kVersion;
    report["command"] = config.command;
    const Json cfg = config_to_json(config);
    report["config"] = cfg;
    report["config_hash"] = hex64(fnv1a64(cfg.dump()));
  }

  void fail(const std::string& stage, const std::string& what) {
    Check c;
    c.name = stage;
    c.anchor = "pipeline stage completes";
    c.metric = stage;
    c.pass = false;
    c.note = what;
    checks.push_back(c);
  }

  CommandOutcome finish(const RunConfig& config) {
    Json arr = Json::array();
    Json failed = Json::array();
    int passed = 0;
    for (const Check& c : checks) {
      arr.push_back(check_to_json(c));
      if (c.pass) {
        ++passed;
      } else {
        failed.push_back(c.name);
      }
    }
    report["checks"] = arr;
    const bool pass = failed.empty();
    Json summary;
    summary["checks"] = static_cast<int>(checks.size());
    summary["passed"] = passed;
    summary["failed"] = failed;
    summary["pass"] = pass;
    report["summary"] = summary;
    Json run;
    run["started"] = started;
    run["finished"] = utc_now();
    run["threads"] = thread_count();
    run["out"] = config.out.string();
    report["run"] = run;
    CommandOutcome out;
    out.report = report;
    out.pass = pass;
    return out;
  }
};

Json runs_json(const std::vector<ResolutionAnalysis>& runs) {
  Json arr = Json::array();
  for (const ResolutionAnalysis& r : runs) arr.push_back(resolution_to_json(r));
  return arr;
}

Json patch_json(const ImmersionPatch& p) {
  Json j;
  j["name"] = p.name;
  j["ambient_dim"] = p.ambient_dim;
  j["domain"] = {{"u_min", p.domain.u_min}, {"u_max", p.domain.u_max}, {"v_min", p.domain.v_min}, {"v_max", p.domain.v_max}};
  Json params = Json::object();
  for (const auto& [k, v] : p.params) params[k] = v;
  j["params"] = params;
  j["traits"] = {{"minimal", p.traits.minimal},
                 {"holomorphic", p.traits.holomorphic},
                 {"flat_normal", p.traits.flat_normal},
                 {"waist", p.traits.waist ? Json::array({p.traits.waist->first, p.traits.waist->second}) : Json(nullptr)}};
  j["normal_hint"] = p.normal_hint == NormalStructureHint::ambient_restriction ? "ambient_restriction" : "frame_constant";
  return j;
}

bool is_order_metric_check(const Check& c) { return c.kind == CheckKind::order; }

// Runs f(resolution) for each resolution; a module error becomes a failed check.
template <class F>
std::vector<ResolutionAnalysis> run_resolutions(const RunConfig& config, ReportBuilder& rb, const std::string& stage, F f) {
  std::vector<ResolutionAnalysis> runs;
  for (int n : config.resolutions) {
    try {
      runs.push_back(f(n));
    } catch (const Error& e) {
      rb.fail(stage + "@" + std::to_string(n), e.what());
    }
  }
  return runs;
}

}  // namespace

void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "surface") {
    c.surface = value;
  } else if (key.rfind("param.", 0) == 0) {
    c.params[key.substr(6)] = value;
  } else if (key == "k") {
    c.k = static_cast<int>(to_integer(key, value));
  } else if (key == "tmax") {
    c.tmax = to_double(key, value);
  } else if (key == "res") {
    c.resolutions = parse_resolution_list(value);
  } else if (key == "jet") {
    parse_jet(value);
    c.jet = value;
  } else if (key == "synthetic") {
    c.synthetic = value;
  } else if (key == "jn") {
    if (value != "search" && value != "catalog") throw BadParams("jn expects search or catalog, got '" + value + "'");
    c.jn = value;
  } else if (key == "out") {
    c.out = value;
  } else if (key == "format") {
    if (value != "json" && value != "csv" && value != "both") throw BadParams("format expects json, csv or both");
    c.format = value;
  } else if (key == "metric_tol") {
    c.metric_tol = to_double(key, value);
  } else if (key == "solver_tol") {
    c.solver_tol = to_double(key, value);
  } else if (key == "identity_tol") {
    c.identity_tol = to_double(key, value);
  } else if (key == "null_tol") {
    c.null_tol = to_double(key, value);
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(to_integer(key, value));
  } else {
    throw BadParams("unknown config key '" + key + "'");
  }
}

void apply_config_text(RunConfig& config, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw BadParams("config line " + std::to_string(lineno) + ": expected key = value");
    apply_config_entry(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BadParams("cannot read config file " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  apply_config_text(config, os.str());
}

std::vector<int> parse_resolution_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    const long long n = to_integer("res", item);
    if (n < 5 || n > 4097) throw BadParams("resolution " + item + " outside [5, 4097]");
    out.push_back(static_cast<int>(n));
  }
  if (out.empty()) throw BadParams("empty resolution list");
  return out;
}

JetSpec parse_jet(const std::string& text) {
  JetSpec spec;
  if (text == "analytic") return spec;
  if (text.rfind("fd:", 0) == 0) {
    spec.mode = JetMode::finite_difference;
    spec.step = to_double("jet", text.substr(3));
    if (!(spec.step > 0)) throw BadParams("finite-difference step must be positive");
    return spec;
  }
  if (text == "fd") {
    spec.mode = JetMode::finite_difference;
    return spec;
  }
  throw BadParams("jet expects analytic or fd:H, got '" + text + "'");
}

ImmersionPatch config_patch(const RunConfig& config) {
  ParamMap params = config.params;
  if (config.k) params["k"] = std::to_string(*config.k);
  if (config.tmax) {
    std::ostringstream os;
    os << std::setprecision(17) << *config.tmax;
    params["tmax"] = os.str();
  }
  ImmersionPatch p = builtin_surface(config.surface, params);
  p.jet = parse_jet(config.jet);
  return p;
}

AnalysisOptions config_options(const RunConfig& config) {
  AnalysisOptions o;
  o.jn_source = config.jn == "catalog" ? JNSource::catalog : JNSource::search;
  o.seed = config.seed;
  o.metric_tol = config.metric_tol;
  o.holonomy.null_tol = config.null_tol;
  o.spectrum.solver_tol = config.solver_tol;
  return o;
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  if (c.command == "holonomy" && !c.synthetic.empty()) {
    j["synthetic"] = c.synthetic;
  } else if (c.command != "catalog") {
    j["surface"] = c.surface;
    Json params = Json::object();
    for (const auto& [k, v] : c.params) params[k] = v;
    j["params"] = params;
    j["k"] = c.k ? Json(*c.k) : Json(nullptr);
    j["tmax"] = c.tmax ? Json(*c.tmax) : Json(nullptr);
    j["jet"] = c.jet;
    j["jn"] = c.jn;
  }
  j["resolutions"] = c.resolutions;
  j["tolerances"] = {{"metric_tol", c.metric_tol},
                     {"solver_tol", c.solver_tol},
                     {"identity_tol", c.identity_tol},
                     {"null_tol", c.null_tol}};
  j["seed"] = c.seed;
  return j;
}

std::vector<Check> identity_checks(const ImmersionPatch& patch, const RunConfig& config,
                                   const std::vector<ResolutionAnalysis>& runs) {
  const SurfaceTraits& t = patch.traits;
  const double tol = config.identity_tol;
  const bool refine = runs.size() >= 2;
  const bool has_jn = !runs.empty() && std::all_of(runs.begin(), runs.end(), [](const ResolutionAnalysis& r) {
    return r.metrics.has("jn_found") && r.metrics.get("jn_found") > 0.5;
  });
  std::vector<Check> out;
  auto add = [&](const std::string& name, const std::string& anchor, const std::string& metric, CheckKind kind, double thr) {
    out.push_back(evaluate_check(name, anchor, metric, kind, thr, runs));
  };
  auto order = [&](const std::string& name, const std::string& anchor, const std::string& metric) {
    if (refine) add(name, anchor, metric, CheckKind::order, kMinOrder);
  };

  add("frame_orthonormality", "tau and nu form an orthonormal frame", "frame_orthonormality", CheckKind::at_most, tol);
  add("frame_orientation", "continued frames keep their orientation", "frame_orientation_defects", CheckKind::at_most, 0.0);
  add("connection_antisymmetry", "Gamma and theta are skew (metric compatibility)", "connection_antisymmetry", CheckKind::at_most, 1e-12);
  add("second_fundamental_form_symmetry", "A(X,Y) = A(Y,X)", "a_symmetry", CheckKind::at_most, 1e-12);
  order("gauss_equation_order", "K = <A11,A22> - |A12|^2", "gauss_equation");
  order("ricci_equation_order", "F^D from A by the Ricci equation", "ricci_equation");
  order("first_derivative_identity_order", "D_tau a_perp + A(tau, a^T) = 0", "first_derivative_identity");
  order("cutoff_identity_order", "second variation of f s by integration by parts", "cutoff_discrepancy");
  if (t.minimal) {
    add("minimality_analytic", "A11 + A22 = 0", "minimality_analytic", CheckKind::at_most, tol);
    order("minimality_order", "A11 + A22 = 0 with difference jets", "minimality_fd");
    order("jacobi_a_perp_order", "a_perp is a Jacobi field", "jacobi_a_perp");
  } else if (refine) {
    add("minimality_fails", "non-minimal patch keeps a mean curvature residual", "minimality_fd", CheckKind::non_decaying, 1e-6);
  }

  add("jn_found", "parallel orthogonal complex structure on the normal bundle", "jn_found", CheckKind::at_least, 1.0);
  if (!has_jn) return out;
  add("jn_orthogonality", "J_N^T J_N = I", "jn_orthogonality", CheckKind::at_most, tol);
  add("jn_square", "J_N^2 = -I", "jn_square", CheckKind::at_most, tol);
  order("jn_parallelism_order", "D J_N = 0", "jn_parallelism");
  if (config.jn == "search" && patch.normal_hint == NormalStructureHint::ambient_restriction) {
    add("jn_matches_ambient_restriction", "J_N is the restricted ambient structure", "jn_distance_to_hint", CheckKind::at_most, 1e-6);
  }

  add("q_general_form", "q(a) through A+ and A- equals the direct form", "q_general_vs_direct", CheckKind::at_most, tol);
  add("q_homogeneity", "q(lambda a) = lambda^2 q(a)", "q_homogeneity", CheckKind::at_most, tol);
  add("q_trace_free", "sum_i q(e_i) = 0", "q_trace", CheckKind::at_most, tol);
  add("q_trace_free_random_basis", "trace of q in a random orthonormal basis vanishes", "q_trace_random_basis", CheckKind::at_most, tol);
  add("q_trace_free_random_jn", "trace of q vanishes for a pointwise complex structure", "q_trace_random_jn", CheckKind::at_most, tol);
  add("apm_sum", "A+ + A- = A", "apm_sum", CheckKind::at_most, 1e-12);
  add("apm_intertwine_plus", "A+(J X, Y) = J_N A+(X, Y)", "apm_intertwine_plus", CheckKind::at_most, 1e-12);
  add("apm_intertwine_minus", "A-(J X, Y) = -J_N A-(X, Y)", "apm_intertwine_minus", CheckKind::at_most, 1e-12);
  add("apm_swap", "reversing J_N swaps A+ and A-", "swap_identity", CheckKind::at_most, 1e-12);
  add("res_b_identity", "res_b = 2 max |A-|", "res_b_identity", CheckKind::at_most, 1e-12);
  add("res_b_minus_identity", "res_b for -J_N = 2 max |A+|", "res_b_minus_identity", CheckKind::at_most, 1e-12);
  add("res_b_swap", "res_b for -J_N equals the A+ residual", "swap_res_b", CheckKind::at_most, 1e-12);
  add("dbar_intertwine", "D01 A+ intertwines J and J_N", "dbar_intertwine", CheckKind::at_most, tol);
  add("special_variation_upper", "|grad f|^2 |a_perp|^2 <= |grad f|^2", "special_variation_slack", CheckKind::at_least, -tol);
  order("weitzenbock_sum_order", "del-bar Weitzenbock sum", "weitzenbock_sum");
  order("weitzenbock_diff_order", "del-bar Weitzenbock difference", "weitzenbock_diff");
  order("weitzenbock_sum_aplus_order", "Weitzenbock sum applied to A+", "weitzenbock_sum_aplus");
  order("weitzenbock_diff_aplus_order", "Weitzenbock difference applied to A+", "weitzenbock_diff_aplus");

  if (t.minimal) {
    add("q_surface_form", "q(a) = 4 <A+, a> <A-, a> sums with tau_1", "q_surface_vs_direct", CheckKind::at_most, tol);
    add("q_surface_form_tau2", "the surface form of q with tau_2", "q_surface_tau2_vs_direct", CheckKind::at_most, tol);
    add("apm_symmetric", "A+ and A- are symmetric", "apm_symmetry", CheckKind::at_most, tol);
    add("apm_trace_free", "A+ and A- are trace-free", "apm_tracefree", CheckKind::at_most, tol);
    add("dichotomy_certificate", "polarized certificate bounded by the q amplitude", "dichotomy_c_excess", CheckKind::at_most, tol);
    order("dbar_plus_order", "D01 A+ = 0", "dbar_plus");
    order("dbar_minus_order", "D10 A- = 0", "dbar_minus");
    order("a_plus_pde_order", "A+ solves the curvature PDE", "a_plus_pde");
    order("special_variation_order", "second variation of f J_N a_perp", "special_variation_gap");
  } else if (refine) {
    add("dbar_plus_fails", "non-minimal patch keeps a D01 A+ residual", "dbar_plus", CheckKind::non_decaying, 1e-6);
  }

  if (t.holomorphic) {
    order("jbar_constancy_order", "reconstructed ambient structure is constant", "jbar_constancy");
    order("jbar_holomorphy_order", "F_* J = Jbar F_*", "jbar_holomorphy");
    order("res_b_order", "A- vanishes", "res_b");
    order("res_a_order", "J is parallel along the immersion", "res_a");
    order("dichotomy_order", "min(|A+|, |A-|) vanishes", "dichotomy_m_max");
    add("holomorphic_special_variation", "q vanishes so the middle term is nonnegative", "special_variation_middle", CheckKind::at_least, -tol);
    if (!t.flat_normal) add("antiholomorphic_residual", "the opposite structure is not holomorphic", "res_b_minus", CheckKind::at_least, 0.5);
  } else if (t.minimal && t.waist) {
    add("jbar_not_constant", "no constant ambient structure makes the patch holomorphic", "jbar_constancy", CheckKind::at_least, 0.1);
    add("waist_apm_bounded_below", "min(|A+|, |A-|) at the waist", "waist_apm_min", CheckKind::at_least, 0.1);
    add("res_b_bounded_below", "A- does not vanish", "res_b", CheckKind::at_least, 0.1);
    add("res_b_minus_bounded_below", "A+ does not vanish", "res_b_minus", CheckKind::at_least, 0.1);
  }
  return out;
}

std::vector<Check> spectrum_checks(const ImmersionPatch& patch, const RunConfig& config,
                                   const std::vector<ResolutionAnalysis>& runs) {
  std::vector<Check> out;
  auto add = [&](const std::string& name, const std::string& anchor, const std::string& metric, CheckKind kind, double thr) {
    out.push_back(evaluate_check(name, anchor, metric, kind, thr, runs));
  };
  add("form_symmetric", "assembled second variation is symmetric", "form_asymmetry", CheckKind::at_most, 0.0);
  add("assembled_matches_quadrature", "x^T (K - P) x equals direct quadrature", "assembled_vs_direct", CheckKind::at_most, 1e-10);
  add("eigensolver_converged", "smallest eigenpair converged", "converged", CheckKind::at_least, 1.0);
  add("eigen_residual", "M-weighted eigen residual", "eigen_residual", CheckKind::at_most, config.solver_tol);
  if (patch.name == "plane_k") {
    add("flat_eigenvalue_within_1pct", "lambda_min matches the Dirichlet eigenvalue of the rectangle", "flat_relative_error", CheckKind::at_most, 0.01);
    if (runs.size() >= 2) add("flat_eigenvalue_order", "lambda_min converges to the Dirichlet eigenvalue", "flat_error", CheckKind::order, kMinOrder);
  }
  if (patch.traits.holomorphic) {
    add("holomorphic_patch_stable", "holomorphic patches are stable", "lambda_min", CheckKind::at_least, -config.solver_tol);
  }
  if (patch.name == "catenoid_r6" && patch.domain.u_max >= 1.5 && patch.domain.v_max - patch.domain.v_min >= 3.0) {
    add("catenoid_patch_unstable", "the catenoid on |t| <= 2 has a negative direction", "lambda_min", CheckKind::below, 0.0);
  }
  return out;
}

CommandOutcome cmd_analyze(const RunConfig& config) {
  ReportBuilder rb(config);
  const ImmersionPatch patch = config_patch(config);
  const AnalysisOptions opt = config_options(config);
  rb.report["surface"] = patch_json(patch);
  const auto runs = run_resolutions(config, rb, "analyze", [&](int n) { return analyze_resolution(patch, n, opt); });
  rb.report["resolutions"] = runs_json(runs);
  for (Check& c : identity_checks(patch, config, runs)) rb.checks.push_back(std::move(c));
  CommandOutcome out = rb.finish(config);
  for (const ResolutionAnalysis& r : runs) out.csv_files.emplace_back("fields_" + std::to_string(r.resolution) + ".csv", fields_csv(r.fields));
  return out;
}

CommandOutcome cmd_convergence(const RunConfig& config) {
  ReportBuilder rb(config);
  const ImmersionPatch patch = config_patch(config);
  const AnalysisOptions opt = config_options(config);
  rb.report["surface"] = patch_json(patch);
  const auto runs = run_resolutions(config, rb, "convergence", [&](int n) { return analyze_resolution(patch, n, opt); });
  if (runs.size() < 2) rb.fail("convergence", "a convergence study needs at least two resolutions");
  std::vector<Check> checks = identity_checks(patch, config, runs);
  Json table = Json::array();
  std::ostringstream csv;
  csv << std::setprecision(17) << "metric,resolution,h,value,order\n";
  for (const Check& c : checks) {
    if (!is_order_metric_check(c) || c.values.size() != runs.size()) continue;
    Json row;
    row["metric"] = c.metric;
    Json h = Json::array(), v = Json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
      h.push_back(runs[i].h);
      v.push_back(c.values[i]);
      csv << c.metric << ',' << runs[i].resolution << ',' << runs[i].h << ',' << c.values[i] << ',' << (c.order ? *c.order : 0.0) << '\n';
    }
    row["h"] = h;
    row["values"] = v;
    row["order"] = c.order ? Json(*c.order) : Json(nullptr);
    row["at_floor"] = c.note == "at round-off floor";
    table.push_back(row);
  }
  rb.report["convergence"] = table;
  rb.report["resolutions"] = runs_json(runs);
  for (Check& c : checks) rb.checks.push_back(std::move(c));
  CommandOutcome out = rb.finish(config);
  out.csv_files.emplace_back("convergence.csv", csv.str());
  return out;
}

CommandOutcome cmd_spectrum(const RunConfig& config) {
  ReportBuilder rb(config);
  const ImmersionPatch patch = config_patch(config);
  const AnalysisOptions opt = config_options(config);
  rb.report["surface"] = patch_json(patch);
  const auto runs = run_resolutions(config, rb, "spectrum", [&](int n) { return spectrum_resolution(patch, n, opt); });
  rb.report["resolutions"] = runs_json(runs);
  rb.report["note"] = "a nonnegative patch spectrum is necessary for stability, not sufficient";
  for (Check& c : spectrum_checks(patch, config, runs)) rb.checks.push_back(std::move(c));
  CommandOutcome out = rb.finish(config);
  for (const ResolutionAnalysis& r : runs) out.csv_files.emplace_back("eigen_section_" + std::to_string(r.resolution) + ".csv", fields_csv(r.fields));
  return out;
}

namespace {

Json holonomy_json(const HolonomyResult& h) {
  Json j;
  j["found"] = h.found;
  j["base"] = {h.base_i, h.base_j};
  j["commutant_dim"] = h.commutant_dim;
  Json sv = Json::array();
  for (int i = 0; i < h.singular_values.size(); ++i) sv.push_back(h.singular_values(i));
  j["singular_values"] = sv;
  j["antisymmetric_sigma_min"] = h.antisymmetric_sigma_min;
  j["commutation_residual"] = h.commutation_residual;
  j["J_base"] = h.found ? matrix_json(h.J_base) : Json(nullptr);
  j["curvature_samples"] = h.curvature_count;
  Json loops = Json::array();
  for (const LoopRecord& l : h.loops) {
    loops.push_back({{"corner", {l.i1, l.j1}}, {"transport", matrix_json(l.holonomy)}, {"orthogonality", l.orthogonality}});
  }
  j["loops"] = loops;
  j["certificate"] = h.found ? "complex structure in the commutant of the sampled holonomy and curvature"
                             : "no antisymmetric matrix in the numerical commutant; smallest antisymmetric singular value attached";
  return j;
}

}  // namespace

CommandOutcome cmd_holonomy(const RunConfig& config) {
  ReportBuilder rb(config);
  const AnalysisOptions opt = config_options(config);
  std::vector<ResolutionAnalysis> runs;
  Json details = Json::array();
  if (!config.synthetic.empty()) {
    for (int n : config.resolutions) {
      try {
        const ChartDomain d = ChartDomain{}.with_resolution(n);
        const ThetaTransport transport(synthetic_connection(config.synthetic, d).theta_chart);
        const HolonomyResult h = find_parallel_JN(transport, opt.holonomy);
        ResolutionAnalysis r;
        r.resolution = n;
        r.h = d.hu();
        r.metrics.set("jn_found", h.found ? 1.0 : 0.0);
        r.metrics.set("jn_commutant_dim", h.commutant_dim);
        r.metrics.set("jn_antisymmetric_sigma_min", h.antisymmetric_sigma_min);
        runs.push_back(r);
        Json hj = holonomy_json(h);
        hj["resolution"] = n;
        details.push_back(hj);
      } catch (const Error& e) {
        rb.fail("holonomy@" + std::to_string(n), e.what());
      }
    }
    rb.report["synthetic"] = config.synthetic;
    rb.report["resolutions"] = runs_json(runs);
    rb.report["holonomy"] = details;
    rb.checks.push_back(evaluate_check("none_found", "holonomy generates SO(4): no invariant complex structure", "jn_found",
                                       CheckKind::at_most, 0.0, runs));
    rb.checks.push_back(evaluate_check("none_found_certificate", "antisymmetric commutant singular values stay above the null threshold",
                                       "jn_antisymmetric_sigma_min", CheckKind::at_least, 10.0 * config.null_tol, runs));
    return rb.finish(config);
  }

  const ImmersionPatch patch = config_patch(config);
  rb.report["surface"] = patch_json(patch);
  for (int n : config.resolutions) {
    try {
      const ChartDomain grid = patch.domain.with_resolution(n);
      const SurfaceGeometry geo = build_geometry(patch, grid, opt.metric_tol);
      const ChosenJN chosen = choose_JN(patch, geo.frames, geo.A, opt);
      ResolutionAnalysis r;
      r.resolution = n;
      r.h = grid.hu();
      r.metrics.set("jn_found", chosen.J ? 1.0 : 0.0);
      r.metrics.set("jn_commutant_dim", chosen.holonomy.commutant_dim);
      r.metrics.set("jn_antisymmetric_sigma_min", chosen.holonomy.antisymmetric_sigma_min);
      r.metrics.set("jn_commutation_residual", chosen.holonomy.commutation_residual);
      r.metrics.set("jn_flipped_to_hint", chosen.flipped ? 1.0 : 0.0);
      if (chosen.J) {
        r.metrics.set("jn_distance_to_hint", chosen.hint_distance);
        const AxiomReport ax = check_JN_axioms(*chosen.J, geo.frames);
        r.metrics.set("jn_orthogonality", ax.orthogonality);
        r.metrics.set("jn_square", ax.square);
        r.metrics.set("jn_parallelism", ax.parallelism);
      }
      runs.push_back(r);
      Json hj = holonomy_json(chosen.holonomy);
      hj["resolution"] = n;
      details.push_back(hj);
    } catch (const Error& e) {
      rb.fail("holonomy@" + std::to_string(n), e.what());
    }
  }
  rb.report["resolutions"] = runs_json(runs);
  rb.report["holonomy"] = details;
  rb.report["note"] = "loop sampling on the patch is a heuristic certificate of the holonomy group";
  const double tol = config.identity_tol;
  auto add = [&](const std::string& name, const std::string& anchor, const std::string& metric, CheckKind kind, double thr) {
    rb.checks.push_back(evaluate_check(name, anchor, metric, kind, thr, runs));
  };
  add("jn_found", "parallel orthogonal complex structure on the normal bundle", "jn_found", CheckKind::at_least, 1.0);
  const bool found = !runs.empty() && std::all_of(runs.begin(), runs.end(), [](const ResolutionAnalysis& r) {
    return r.metrics.get("jn_found") > 0.5;
  });
  if (found) {
    add("jn_commutes", "J_N commutes with the sampled holonomy", "jn_commutation_residual", CheckKind::at_most, config.null_tol);
    add("jn_orthogonality", "J_N^T J_N = I", "jn_orthogonality", CheckKind::at_most, tol);
    add("jn_square", "J_N^2 = -I", "jn_square", CheckKind::at_most, tol);
    if (runs.size() >= 2) add("jn_parallelism_order", "D J_N = 0", "jn_parallelism", CheckKind::order, kMinOrder);
    if (patch.normal_hint == NormalStructureHint::ambient_restriction) {
      add("jn_matches_ambient_restriction", "J_N is the restricted ambient structure", "jn_distance_to_hint", CheckKind::at_most, 1e-6);
    }
  }
  return rb.finish(config);
}

CommandOutcome cmd_catalog(const RunConfig& config) {
  ReportBuilder rb(config);
  Json entries = Json::array();
  for (const std::string& name : catalog_names()) {
    try {
      entries.push_back(patch_json(builtin_surface(name)));
    } catch (const Error& e) {
      rb.fail("catalog:" + name, e.what());
    }
  }
  rb.report["surfaces"] = entries;
  return rb.finish(config);
}

CommandOutcome run_command(const RunConfig& config) {
  if (config.command == "analyze") return cmd_analyze(config);
  if (config.command == "convergence") return cmd_convergence(config);
  if (config.command == "spectrum") return cmd_spectrum(config);
  if (config.command == "holonomy") return cmd_holonomy(config);
  if (config.command == "catalog") return cmd_catalog(config);
  throw BadParams("unknown command '" + config.command + "'");
}

void write_outcome(const RunConfig& config, const CommandOutcome& outcome) {
  if (config.format == "json" || config.format == "both") {
    write_atomic(config.out / "report.json", outcome.report.dump(2) + "\n");
  }
  if (config.format == "csv" || config.format == "both") {
    for (const auto& [name, contents] : outcome.csv_files) write_atomic(config.out / name, contents);
  }
}

}  // namespace minsurf
