// Acceptance suite: one PASS/FAIL line per criterion on stdout, details on stderr.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "minsurf/analysis.hpp"
#include "minsurf/convergence.hpp"
#include "minsurf/report.hpp"

using namespace minsurf;

namespace {

const std::vector<int> kResolutions = {33, 65, 129};

struct Surface {
  std::string label;
  std::string name;
  ParamMap params;
};

const std::vector<Surface> kCatalog = {
    {"plane_k k=1", "plane_k", {{"k", "1"}}},
    {"plane_k k=2", "plane_k", {{"k", "2"}}},
    {"holo_graph z^2", "holo_graph", {{"p", "z^2"}}},
    {"holo_graph z^3", "holo_graph", {{"p", "z^3"}}},
    {"holo_graph k=2", "holo_graph", {{"k", "2"}}},
    {"scaled_graph", "scaled_graph", {}},
    {"perturbed_graph", "perturbed_graph", {}},
    {"catenoid_r6", "catenoid_r6", {}},
    {"enneper_r6", "enneper_r6", {}},
};

class Criterion {
 public:
  explicit Criterion(std::string title) : title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok) failures_.push_back(what);
  }

  bool report(int id) const {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const bool ok = failures_.empty();
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << title_ << " (" << count_ - failures_.size()
              << "/" << count_ << " checks, " << std::fixed << std::setprecision(1) << secs << " s)" << std::endl;
    for (const auto& f : failures_) std::cerr << "  criterion " << id << ": " << f << '\n';
    return ok;
  }

 private:
  std::string title_;
  std::chrono::steady_clock::time_point start_;
  int count_ = 0;
  std::vector<std::string> failures_;
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << x;
  return os.str();
}

class Cache {
 public:
  const std::vector<ResolutionAnalysis>& identity(const Surface& s) { return get(identity_, s, analyze_resolution); }
  const std::vector<ResolutionAnalysis>& spectrum(const Surface& s) { return get(spectrum_, s, spectrum_resolution); }

 private:
  using Fn = ResolutionAnalysis (*)(const ImmersionPatch&, int, const AnalysisOptions&);
  const std::vector<ResolutionAnalysis>& get(std::map<std::string, std::vector<ResolutionAnalysis>>& store, const Surface& s, Fn fn) {
    auto it = store.find(s.label);
    if (it != store.end()) return it->second;
    const ImmersionPatch p = builtin_surface(s.name, s.params);
    std::vector<ResolutionAnalysis> runs;
    for (int n : kResolutions) runs.push_back(fn(p, n, AnalysisOptions{}));
    return store.emplace(s.label, std::move(runs)).first->second;
  }

  std::map<std::string, std::vector<ResolutionAnalysis>> identity_, spectrum_;
};

double metric(const ResolutionAnalysis& r, const std::string& name) {
  return r.metrics.has(name) ? r.metrics.get(name) : std::numeric_limits<double>::quiet_NaN();
}

// every value <= tol (NaN fails)
void all_at_most(Criterion& c, const Surface& s, const std::vector<ResolutionAnalysis>& runs, const std::string& name, double tol) {
  for (const auto& r : runs) {
    const double v = metric(r, name);
    c.expect(v <= tol, s.label + " @" + std::to_string(r.resolution) + ": " + name + " = " + fmt(v) + " > " + fmt(tol));
  }
}

void order_at_least(Criterion& c, const Surface& s, const std::vector<ResolutionAnalysis>& runs, const std::string& name) {
  std::vector<double> h, r;
  for (const auto& run : runs) {
    h.push_back(run.h);
    r.push_back(metric(run, name));
  }
  const OrderAssessment a = assess_order(h, r);
  c.expect(a.pass, s.label + ": " + name + " order " + fmt(a.order) + " [" + fmt(r[0]) + ", " + fmt(r[1]) + ", " + fmt(r[2]) + "]");
}

bool criterion_algebraic(Cache& cache) {
  Criterion c("algebraic identities at machine precision, all catalog surfaces, 12 random directions");
  for (const Surface& s : kCatalog) {
    const auto& runs = cache.identity(s);
    const bool minimal = builtin_surface(s.name, s.params).traits.minimal;
    all_at_most(c, s, runs, "q_general_vs_direct", 1e-10);
    all_at_most(c, s, runs, "q_trace", 1e-10);
    all_at_most(c, s, runs, "q_trace_random_basis", 1e-10);
    all_at_most(c, s, runs, "apm_intertwine_plus", 1e-10);
    all_at_most(c, s, runs, "apm_intertwine_minus", 1e-10);
    all_at_most(c, s, runs, "res_b_identity", 1e-12);
    if (minimal) {
      all_at_most(c, s, runs, "q_surface_vs_direct", 1e-10);
      all_at_most(c, s, runs, "q_surface_tau2_vs_direct", 1e-10);
      all_at_most(c, s, runs, "apm_symmetry", 1e-10);
      all_at_most(c, s, runs, "apm_tracefree", 1e-10);
    }
  }
  return c.report(1);
}

bool criterion_convergence(Cache& cache) {
  Criterion c("convergence order >= 1.9 over 33/65/129");
  for (const Surface& s : kCatalog) {
    const ImmersionPatch p = builtin_surface(s.name, s.params);
    if (!p.traits.minimal) continue;
    const auto& runs = cache.identity(s);
    if (s.name == "holo_graph" || s.name == "catenoid_r6") order_at_least(c, s, runs, "minimality_fd");
    for (const char* m : {"jacobi_a_perp", "first_derivative_identity", "cutoff_discrepancy", "dbar_plus", "dbar_minus",
                          "weitzenbock_sum", "weitzenbock_diff", "a_plus_pde"}) {
      order_at_least(c, s, runs, m);
    }
    if (s.name == "holo_graph") {
      order_at_least(c, s, runs, "jbar_constancy");
      order_at_least(c, s, runs, "jbar_holomorphy");
    }
  }
  return c.report(2);
}

bool criterion_negative(Cache& cache) {
  Criterion c("negative controls: perturbed graph and catenoid");
  const Surface& pert = kCatalog[6];
  const auto& pr = cache.identity(pert);
  for (const char* m : {"minimality_fd", "dbar_plus"}) {
    for (std::size_t k = 1; k < pr.size(); ++k) {
      const double a = metric(pr[k - 1], m), b = metric(pr[k], m);
      c.expect(non_decaying(a, b, 1e-6), pert.label + ": " + m + " decays " + fmt(a) + " -> " + fmt(b));
    }
  }
  const Surface& cat = kCatalog[7];
  for (const auto& r : cache.identity(cat)) {
    const double jc = metric(r, "jbar_constancy"), w = metric(r, "waist_apm_min");
    c.expect(jc >= 0.1, cat.label + " @" + std::to_string(r.resolution) + ": jbar_constancy " + fmt(jc) + " < 0.1");
    c.expect(w >= 0.05, cat.label + " @" + std::to_string(r.resolution) + ": waist min(|A+|,|A-|) " + fmt(w) + " < 0.05");
  }
  return c.report(3);
}

bool criterion_spectral(Cache& cache) {
  Criterion c("spectral checks: flat square, catenoid, holomorphic graphs, assembled form");
  const std::vector<Surface> surfaces = {kCatalog[0], kCatalog[7], kCatalog[2], kCatalog[3], kCatalog[4]};
  for (const Surface& s : surfaces) {
    const auto& runs = cache.spectrum(s);
    all_at_most(c, s, runs, "assembled_vs_direct", 1e-10);
    for (const auto& r : runs) c.expect(metric(r, "converged") == 1.0, s.label + " @" + std::to_string(r.resolution) + ": eigensolver did not converge");
    if (s.name == "plane_k") {
      const auto& fine = runs.back();
      const double rel = metric(fine, "flat_relative_error");
      c.expect(fine.resolution == 129 && rel <= 0.01, "flat lambda_min " + fmt(metric(fine, "lambda_min")) + " relative error " + fmt(rel));
    } else if (s.name == "catenoid_r6") {
      for (const auto& r : runs) {
        const double l = metric(r, "lambda_min");
        c.expect(l < 0.0, "catenoid @" + std::to_string(r.resolution) + ": lambda_min " + fmt(l) + " not negative");
      }
    } else {
      for (const auto& r : runs) {
        const double l = metric(r, "lambda_min");
        c.expect(l >= -1e-9, s.label + " @" + std::to_string(r.resolution) + ": lambda_min " + fmt(l));
      }
    }
  }
  return c.report(4);
}

bool criterion_holonomy(Cache& cache) {
  Criterion c("normal complex structure search: found on catenoid and holomorphic graphs, none for so(4)");
  for (const Surface& s : {kCatalog[2], kCatalog[3], kCatalog[4], kCatalog[5], kCatalog[7]}) {
    for (const auto& r : cache.identity(s)) {
      c.expect(metric(r, "jn_found") == 1.0, s.label + " @" + std::to_string(r.resolution) + ": no parallel J_N found");
      c.expect(metric(r, "jn_orthogonality") <= 1e-10 && metric(r, "jn_square") <= 1e-10,
               s.label + " @" + std::to_string(r.resolution) + ": J_N fails the algebraic axioms");
    }
  }
  const HolonomyOptions opt;
  for (int n : kResolutions) {
    const ChartDomain d = ChartDomain{}.with_resolution(n);
    const ThetaTransport t(synthetic_connection("so4", d).theta_chart);
    const HolonomyResult h = find_parallel_JN(t, opt);
    c.expect(!h.found, "so4 @" + std::to_string(n) + ": a complex structure was reported");
    c.expect(h.antisymmetric_sigma_min > opt.null_tol,
             "so4 @" + std::to_string(n) + ": certificate " + fmt(h.antisymmetric_sigma_min) + " not above the null threshold");
  }
  return c.report(5);
}

std::string body_of(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return "<missing " + file.string() + ">";
  Json j = Json::parse(in);
  return report_body(j);
}

bool criterion_determinism() {
  Criterion c("determinism: identical configs give byte-identical report bodies");
  const auto root = std::filesystem::temp_directory_path() / "minsurf_lab_acceptance";
  std::filesystem::remove_all(root);
  const std::vector<std::string> commands = {
      "analyze --surface holo_graph --param p=z^3 --res 33,65",
      "analyze --surface catenoid_r6 --res 33",
      "spectrum --surface catenoid_r6 --res 33",
      "holonomy --synthetic so4 --res 33",
  };
  int idx = 0;
  for (const std::string& cmd : commands) {
    std::vector<std::string> bodies;
    for (int threads : {1, 3}) {
      const auto out = root / (std::to_string(idx) + "_" + std::to_string(threads));
      const std::string line = "MINSURF_LAB_THREADS=" + std::to_string(threads) + " '" MINSURF_LAB_CLI "' " + cmd +
                               " --quiet --out '" + out.string() + "'";
      const int rc = std::system(line.c_str());
      c.expect(rc != -1, "could not run: " + line);
      bodies.push_back(body_of(out / "report.json"));
    }
    c.expect(bodies[0] == bodies[1], "report bodies differ for: " + cmd);
    c.expect(bodies[0].find("\"checks\"") != std::string::npos, "no report written for: " + cmd);
    ++idx;
  }
  std::filesystem::remove_all(root);
  return c.report(6);
}

}  // namespace

int main() {
  Cache cache;
  const std::vector<std::function<bool()>> criteria = {
      [&] { return criterion_algebraic(cache); },  [&] { return criterion_convergence(cache); },
      [&] { return criterion_negative(cache); },   [&] { return criterion_spectral(cache); },
      [&] { return criterion_holonomy(cache); },   [] { return criterion_determinism(); },
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      all = criteria[i]() && all;
    } catch (const std::exception& e) {
      std::cout << "FAIL criterion " << i + 1 << ": error: " << e.what() << std::endl;
      all = false;
    }
  }
  std::cout << (all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << std::endl;
  return all ? 0 : 1;
}
