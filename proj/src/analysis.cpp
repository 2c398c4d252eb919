#include "minsurf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "minsurf/error.hpp"
#include "minsurf/frames.hpp"
#include "minsurf/holo.hpp"
#include "minsurf/variation.hpp"

namespace minsurf {

void MetricTable::set(const std::string& name, double value) {
  for (auto& [k, v] : entries_) {
    if (k == name) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(name, value);
}

bool MetricTable::has(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == name; });
}

double MetricTable::get(const std::string& name) const {
  for (const auto& [k, v] : entries_) {
    if (k == name) return v;
  }
  throw Error("no metric named " + name);
}

void FieldTable::add(const std::string& name, const GridField<double>& field) {
  domain = field.domain();
  names.push_back(name);
  std::vector<double> col(field.data().size(), std::nan(""));
  for (int j = 0; j < domain.nv; ++j) {
    for (int i = 0; i < domain.nu; ++i) {
      if (field.valid(i, j)) col[field.index(i, j)] = field(i, j);
    }
  }
  columns.push_back(std::move(col));
}

namespace {

double max_abs(const GridField<double>& f) {
  const ChartDomain& d = f.domain();
  double worst = 0.0;
  for (int j = f.margin(); j < d.nv - f.margin(); ++j) {
    for (int i = f.margin(); i < d.nu - f.margin(); ++i) worst = std::max(worst, std::abs(f(i, j)));
  }
  return worst;
}

double max_abs_diff(const GridField<double>& a, const GridField<double>& b) {
  const ChartDomain& d = a.domain();
  const int m = std::max(a.margin(), b.margin());
  double worst = 0.0;
  for (int j = m; j < d.nv - m; ++j) {
    for (int i = m; i < d.nu - m; ++i) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  }
  return worst;
}

GridField<double> column_norm(const NormalTensorField& T, int column) {
  GridField<double> out(T.values.domain(), T.margin(), 0.0);
  const ChartDomain& d = T.values.domain();
  for (int j = T.margin(); j < d.nv - T.margin(); ++j) {
    for (int i = T.margin(); i < d.nu - T.margin(); ++i) out(i, j) = T(i, j).col(column).norm();
  }
  return out;
}

std::vector<Vec> random_directions(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec> out;
  for (int c = 0; c < count; ++c) {
    Vec a(n);
    for (int k = 0; k < n; ++k) a(k) = gauss(rng);
    out.push_back(a);
  }
  return out;
}

Mat random_orthogonal(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat X(n, n);
  for (int c = 0; c < n; ++c) {
    for (int k = 0; k < n; ++k) X(k, c) = gauss(rng);
  }
  return Eigen::HouseholderQR<Mat>(X).householderQ();
}

std::pair<int, int> nearest_node(const ChartDomain& d, double u, double v) {
  const int i = static_cast<int>(std::lround((u - d.u_min) / d.hu()));
  const int j = static_cast<int>(std::lround((v - d.v_min) / d.hv()));
  return {std::clamp(i, 0, d.nu - 1), std::clamp(j, 0, d.nv - 1)};
}

double frame_orthonormality(const FramePackage& fr) {
  const ChartDomain& d = fr.domain;
  double worst = 0.0;
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) {
      Mat B(fr.ambient_dim, fr.ambient_dim);
      B << fr.tau(i, j), fr.nu(i, j);
      worst = std::max(worst, (B.transpose() * B - Mat::Identity(fr.ambient_dim, fr.ambient_dim)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

// Nodes where (tau_1, tau_2) disagrees with (F_u, F_v) in orientation.
double orientation_defects(const FramePackage& fr) {
  const ChartDomain& d = fr.domain;
  int count = 0;
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) {
      if (fr.E(i, j).determinant() <= 0.0) ++count;
    }
  }
  return count;
}

double connection_antisymmetry(const FramePackage& fr) {
  const ChartDomain& d = fr.domain;
  double worst = 0.0;
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) {
      if (!fr.theta.valid(i, j)) continue;
      for (int p = 0; p < 2; ++p) {
        const auto k = static_cast<std::size_t>(p);
        worst = std::max(worst, (fr.theta(i, j)[k] + fr.theta(i, j)[k].transpose()).cwiseAbs().maxCoeff());
        worst = std::max(worst, (fr.gamma(i, j)[k] + fr.gamma(i, j)[k].transpose()).cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

double symmetry_defect(const NormalTensorField& T) {
  double worst = 0.0;
  const ChartDomain& d = T.values.domain();
  for (int j = T.margin(); j < d.nv - T.margin(); ++j) {
    for (int i = T.margin(); i < d.nu - T.margin(); ++i) worst = std::max(worst, (T(i, j).col(1) - T(i, j).col(2)).norm());
  }
  return worst;
}

double trace_defect(const NormalTensorField& T) { return max_norm(contract(T, 0, 1)); }

// |K - (<A11, A22> - |A12|^2)| and |F^D - Ricci(A)| where the curvature fields are defined.
std::pair<double, double> curvature_equation_residuals(const SurfaceGeometry& g) {
  const ChartDomain& d = g.frames.domain;
  double gauss = 0.0, ricci = 0.0;
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) {
      if (!g.curvature.K.valid(i, j)) continue;
      const Mat& A = g.A(i, j);
      const double predicted = A.col(0).dot(A.col(3)) - A.col(1).squaredNorm();
      gauss = std::max(gauss, std::abs(g.curvature.K(i, j) - predicted));
      ricci = std::max(ricci, (g.curvature.FD(i, j) - ricci_normal_curvature(A)).cwiseAbs().maxCoeff());
    }
  }
  return {gauss, ricci};
}

// Random section vanishing within two cells of the boundary.
NormalTensorField random_compact_section(const ChartDomain& d, int r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  NormalTensorField s(0, d, 0, r);
  for (int j = 2; j < d.nv - 2; ++j) {
    for (int i = 2; i < d.nu - 2; ++i) {
      for (int a = 0; a < r; ++a) s(i, j)(a, 0) = uni(rng);
    }
  }
  return s;
}

ImmersionPatch with_fd_jets(const ImmersionPatch& patch, double step) {
  ImmersionPatch out = patch;
  out.jet.mode = JetMode::finite_difference;
  out.jet.step = step;
  return out;
}

}  // namespace

ChosenJN choose_JN(const ImmersionPatch& patch, const FramePackage& frames, const NormalTensorField& A,
                   const AnalysisOptions& opt) {
  ChosenJN out;
  const NormalComplexStructure hint = patch.normal_hint == NormalStructureHint::ambient_restriction
                                          ? ambient_restriction_JN(frames, standard_ambient_J(frames.ambient_dim))
                                          : constant_JN(frames, standard_block_J(frames.normal_rank));
  if (opt.jn_source == JNSource::catalog) {
    out.J = hint.J;
    return out;
  }
  const AmbientTransport transport(patch, frames, A);
  out.holonomy = find_parallel_JN(transport, opt.holonomy);
  if (!out.holonomy.found) return out;
  GridField<Mat> J = out.holonomy.JN.J;
  const int bi = out.holonomy.base_i, bj = out.holonomy.base_j;
  if ((J(bi, bj).transpose() * hint.J(bi, bj)).trace() < 0.0) {
    for (Mat& x : J.data()) x = -x;
    out.flipped = true;
  }
  for (int j = J.margin(); j < J.nv() - J.margin(); ++j) {
    for (int i = J.margin(); i < J.nu() - J.margin(); ++i) {
      out.hint_distance = std::max(out.hint_distance, (J(i, j) - hint.J(i, j)).norm());
    }
  }
  out.J = std::move(J);
  return out;
}

ResolutionAnalysis analyze_resolution(const ImmersionPatch& patch, int resolution, const AnalysisOptions& opt) {
  const ChartDomain grid = patch.domain.with_resolution(resolution);
  ResolutionAnalysis res;
  res.resolution = resolution;
  res.h = grid.hu();
  MetricTable& M = res.metrics;

  const SurfaceGeometry geo = build_geometry(patch, grid, opt.metric_tol);
  const FramePackage& fr = geo.frames;
  const NormalTensorField& A = geo.A;
  const int n = fr.ambient_dim;

  M.set("frame_orthonormality", frame_orthonormality(fr));
  M.set("frame_orientation_defects", orientation_defects(fr));
  M.set("gauge_min_overlap", fr.gauge_min_overlap);
  M.set("connection_antisymmetry", connection_antisymmetry(fr));
  M.set("a_symmetry", symmetry_defect(A));
  M.set("minimality_analytic", minimality_residual(A));
  {
    const double step = std::min(grid.hu(), grid.hv());
    const FramePackage fd = compute_frames(with_fd_jets(patch, step), grid, opt.metric_tol);
    M.set("minimality_fd", minimality_residual(second_fundamental_form(fd)));
  }
  const auto [gauss, ricci] = curvature_equation_residuals(geo);
  M.set("gauss_equation", gauss);
  M.set("ricci_equation", ricci);

  double first = 0.0, jac = 0.0;
  for (int c = 0; c < n; ++c) {
    const Vec a = Vec::Unit(n, c);
    first = std::max(first, first_derivative_identity_residual(a, fr, A));
    jac = std::max(jac, max_norm(jacobi_operator(normal_projection_constant(a, fr), fr, A)));
  }
  M.set("first_derivative_identity", first);
  M.set("jacobi_a_perp", jac);

  const ChartFunction bump = centered_bump(grid);
  {
    const NormalTensorField s = project_ambient_field(fr, random_ambient_field(n, static_cast<unsigned>(opt.seed)));
    const CutoffIdentity cut = second_variation_cutoff_identity(bump, s, fr, A);
    M.set("cutoff_lhs", cut.lhs);
    M.set("cutoff_rhs", cut.rhs);
    M.set("cutoff_discrepancy", cut.discrepancy);
  }
  res.fields.add("area_element", fr.area);
  res.fields.add("gauss_curvature", geo.curvature.K);
  res.fields.add("mean_curvature_norm", mean_curvature_norm(A));

  const ChosenJN chosen = choose_JN(patch, fr, A, opt);
  M.set("jn_found", chosen.J ? 1.0 : 0.0);
  if (opt.jn_source == JNSource::search) {
    M.set("jn_commutant_dim", chosen.holonomy.commutant_dim);
    M.set("jn_antisymmetric_sigma_min", chosen.holonomy.antisymmetric_sigma_min);
    M.set("jn_commutation_residual", chosen.holonomy.commutation_residual);
    M.set("jn_flipped_to_hint", chosen.flipped ? 1.0 : 0.0);
    if (chosen.J) M.set("jn_distance_to_hint", chosen.hint_distance);
  }
  if (!chosen.J) return res;
  const GridField<Mat>& JN = *chosen.J;

  const AxiomReport ax = check_JN_axioms(JN, fr);
  M.set("jn_orthogonality", ax.orthogonality);
  M.set("jn_square", ax.square);
  M.set("jn_parallelism", ax.parallelism);

  const ApmTensors apm = apm_decompose(A, JN);
  GridField<Mat> negJN = JN;
  for (Mat& x : negJN.data()) x = -x;
  const ApmTensors swapped = apm_decompose(A, negJN);

  // Pointwise algebra of q.
  std::vector<Vec> dirs = random_directions(n, opt.random_directions, opt.seed + 1);
  double q_gen = 0.0, q_surf = 0.0, q_surf2 = 0.0, q_hom = 0.0, q_max = 0.0;
  for (const Vec& a : dirs) {
    const GridField<double> q = q_direct(a, A, JN, fr);
    const QViaApm via = q_via_apm(a, apm, JN, fr);
    q_gen = std::max(q_gen, max_abs_diff(q, via.general));
    q_surf = std::max(q_surf, max_abs_diff(q, via.surface));
    q_surf2 = std::max(q_surf2, max_abs_diff(q, via.surface_tau2));
    for (double lambda : {-1.0, 2.0}) {
      const GridField<double> ql = q_direct(lambda * a, A, JN, fr);
      GridField<double> scaled = q;
      for (double& x : scaled.data()) x *= lambda * lambda;
      q_hom = std::max(q_hom, max_abs_diff(ql, scaled));
    }
  }
  for (int c = 0; c < n; ++c) q_max = std::max(q_max, max_abs(q_direct(Vec::Unit(n, c), A, JN, fr)));
  M.set("q_general_vs_direct", q_gen);
  M.set("q_surface_vs_direct", q_surf);
  M.set("q_surface_tau2_vs_direct", q_surf2);
  M.set("q_homogeneity", q_hom);
  M.set("q_basis_max", q_max);
  const GridField<double> trace = q_trace(A, JN, fr);
  M.set("q_trace", max_abs(trace));
  M.set("q_trace_random_basis", max_abs(q_trace(A, JN, fr, random_orthogonal(n, opt.seed + 2))));
  M.set("q_trace_random_jn", max_abs(q_trace(A, random_pointwise_JN(fr, static_cast<unsigned>(opt.seed + 3)).J, fr)));
  res.fields.add("q_trace", trace);

  // A+/- algebra.
  M.set("apm_sum", max_norm(add(add(apm.plus, apm.minus), A, 1.0, -1.0)));
  M.set("apm_intertwine_plus", max_norm(add(rotate_slot(apm.plus, 0), left_multiply(JN, apm.plus), 1.0, -1.0)));
  M.set("apm_intertwine_minus", max_norm(add(rotate_slot(apm.minus, 0), left_multiply(JN, apm.minus), 1.0, 1.0)));
  M.set("apm_symmetry", std::max(symmetry_defect(apm.plus), symmetry_defect(apm.minus)));
  M.set("apm_tracefree", std::max(trace_defect(apm.plus), trace_defect(apm.minus)));
  M.set("apm_plus_max", max_component_norm(apm.plus));
  M.set("apm_minus_max", max_component_norm(apm.minus));
  M.set("swap_identity", std::max(max_norm(add(swapped.plus, apm.minus, 1.0, -1.0)),
                                  max_norm(add(swapped.minus, apm.plus, 1.0, -1.0))));
  res.fields.add("apm_plus_norm", column_norm(apm.plus, 0));
  res.fields.add("apm_minus_norm", column_norm(apm.minus, 0));

  const HoloResiduals holo = inf_holo_residuals(A, fr, JN);
  M.set("res_b", holo.res_b);
  M.set("res_b_minus", holo.res_b_minus);
  M.set("res_a", holo.res_a);
  M.set("res_a_minus", holo.res_a_minus);
  M.set("res_b_identity", std::abs(holo.res_b - 2.0 * max_component_norm(apm.minus)));
  M.set("res_b_minus_identity", std::abs(holo.res_b_minus - 2.0 * max_component_norm(apm.plus)));
  {
    const HoloResiduals sw = inf_holo_residuals(A, fr, negJN);
    M.set("swap_res_b", std::max(std::abs(sw.res_b - holo.res_b_minus), std::abs(sw.res_b_minus - holo.res_b)));
  }

  const ApmHolomorphicity hol = verify_apm_holomorphicity(apm, A, fr, JN);
  M.set("dbar_plus", hol.res_plus);
  M.set("dbar_minus", hol.res_minus);
  M.set("dbar_plus_full", hol.res_plus_full);
  M.set("dbar_minus_full", hol.res_minus_full);
  M.set("dbar_intertwine", hol.intertwine);

  {
    const WeitzenbockResiduals w = verify_weitzenbock(random_tensor_field(fr, 2, static_cast<unsigned>(opt.seed + 4)), fr, JN);
    M.set("weitzenbock_sum", w.sum_residual);
    M.set("weitzenbock_diff", w.diff_residual);
    const WeitzenbockResiduals wp = verify_weitzenbock(apm.plus, fr, JN);
    M.set("weitzenbock_sum_aplus", wp.sum_residual);
    M.set("weitzenbock_diff_aplus", wp.diff_residual);
  }

  const APlusPdeResidual pde = a_plus_pde_residual(apm, geo.curvature, fr, JN);
  M.set("a_plus_pde_standard", pde.standard);
  M.set("a_plus_pde_flipped", pde.flipped);
  M.set("a_plus_pde", pde.value());
  res.labels.emplace_back("a_plus_pde_sign", pde.annihilating);

  const AmbientComplexStructure jbar = reconstruct_ambient_J(fr, JN, Orientation::plus);
  M.set("jbar_constancy", jbar.constancy_residual);
  M.set("jbar_holomorphy", jbar.holomorphy_residual);
  M.set("jbar_orthogonality", jbar.orthogonality);
  M.set("jbar_square", jbar.square);
  M.set("jbar_projection_distance", jbar.projection_distance);
  M.set("jbar_distance_to_standard",
        std::min((jbar.Jbar - standard_ambient_J(n)).cwiseAbs().maxCoeff(),
                 (jbar.Jbar + standard_ambient_J(n)).cwiseAbs().maxCoeff()));

  const DichotomyField dich = polarized_dichotomy_check(apm, A, JN, fr);
  {
    double excess = 0.0;
    for (std::size_t k = 0; k < dich.c.data().size(); ++k) excess = std::max(excess, dich.c.data()[k] - dich.c_bound.data()[k]);
    M.set("dichotomy_m_max", max_abs(dich.m));
    M.set("dichotomy_c_excess", excess);
    res.fields.add("dichotomy_m", dich.m);
    res.fields.add("dichotomy_c", dich.c);
  }

  if (patch.traits.waist) {
    const auto [wi, wj] = nearest_node(grid, patch.traits.waist->first, patch.traits.waist->second);
    M.set("waist_apm_min", std::min(apm.plus(wi, wj).col(0).norm(), apm.minus(wi, wj).col(0).norm()));
    double qw = 0.0;
    for (int c = 0; c < n; ++c) qw = std::max(qw, std::abs(q_direct(Vec::Unit(n, c), A, JN, fr)(wi, wj)));
    M.set("waist_q_max", qw);
  }

  {
    const SpecialVariation sv = special_variation_inequality(Vec::Unit(n, n - 1), bump, fr, A, JN);
    M.set("special_variation_lhs", sv.lhs);
    M.set("special_variation_middle", sv.middle);
    M.set("special_variation_rhs", sv.rhs);
    M.set("special_variation_gap", std::abs(sv.slack_lhs_middle));
    M.set("special_variation_slack", sv.slack_middle_rhs);
  }
  return res;
}

ResolutionAnalysis spectrum_resolution(const ImmersionPatch& patch, int resolution, const AnalysisOptions& opt) {
  const ChartDomain grid = patch.domain.with_resolution(resolution);
  ResolutionAnalysis res;
  res.resolution = resolution;
  res.h = grid.hu();
  MetricTable& M = res.metrics;

  FramePackage fr = compute_frames(patch, grid, opt.metric_tol);
  connection_coefficients(fr);
  const NormalTensorField A = second_fundamental_form(fr);
  const DiscretizedJacobiForm form = assemble_form(fr, A);
  M.set("unknowns", form.unknowns());
  const SparseMat L = form.K - form.P;
  const SparseMat asym = SparseMat(L.transpose()) - L;
  M.set("form_asymmetry", asym.nonZeros() == 0 ? 0.0 : asym.coeffs().cwiseAbs().maxCoeff());
  M.set("potential_bound", form.potential_bound);

  double worst = 0.0;
  for (int t = 0; t < opt.random_sections; ++t) {
    const NormalTensorField s = random_compact_section(grid, fr.normal_rank, opt.seed + 100 + static_cast<std::uint64_t>(t));
    const Vec x = form.pack(s);
    const double assembled = x.dot(L * x);
    const double direct = second_variation_direct(s, fr, A);
    worst = std::max(worst, std::abs(assembled - direct) / (1.0 + std::abs(direct)));
  }
  M.set("assembled_vs_direct", worst);

  try {
    const SpectrumResult sp = smallest_eigenvalue(form, opt.spectrum);
    M.set("converged", 1.0);
    M.set("lambda_min", sp.lambda_min);
    M.set("eigen_residual", sp.residual_norm);
    M.set("eigen_plain_residual", sp.plain_residual);
    M.set("iterations", sp.iterations);
    M.set("shift", sp.shift);
    GridField<double> norm(grid, 0, 0.0);
    for (int j = 0; j < grid.nv; ++j) {
      for (int i = 0; i < grid.nu; ++i) norm(i, j) = sp.eigen_section(i, j).norm();
    }
    res.fields.add("eigen_section_norm", norm);
  } catch (const NoConvergence& e) {
    M.set("converged", 0.0);
    M.set("lambda_min", e.best_lambda);
    M.set("eigen_residual", e.best_residual);
    M.set("iterations", e.iterations);
  }
  res.labels.emplace_back("patch_stability", M.get("lambda_min") >= -opt.spectrum.solver_tol ? "patch-stable" : "patch-unstable");
  if (patch.traits.flat_normal && patch.name == "plane_k") {
    const double exact = flat_dirichlet_eigenvalue(grid);
    M.set("flat_exact", exact);
    M.set("flat_error", std::abs(M.get("lambda_min") - exact));
    M.set("flat_relative_error", std::abs(M.get("lambda_min") - exact) / exact);
  }
  return res;
}

}  // namespace minsurf
