#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "minsurf/complex_structure.hpp"
#include "minsurf/convergence.hpp"
#include "minsurf/holo.hpp"
#include "minsurf/variation.hpp"

using namespace minsurf;

namespace {

Vec random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec a(n);
  for (int k = 0; k < n; ++k) a(k) = g(rng);
  return a.normalized();
}

double max_abs_diff(const GridField<double>& a, const GridField<double>& b) {
  double w = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) w = std::max(w, std::abs(a.data()[k] - b.data()[k]));
  return w;
}

}  // namespace

TEST_CASE("q is trace-free for any orthogonal normal complex structure") {
  std::mt19937_64 rng(21);
  for (const char* name : {"holo_graph", "catenoid_r6", "perturbed_graph"}) {
    CAPTURE(name);
    const ImmersionPatch p = builtin_surface(name, std::string(name) == "holo_graph" ? ParamMap{{"k", "2"}} : ParamMap{});
    const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(17));
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const GridField<Mat> J = random_pointwise_JN(geo.frames, seed).J;
      GridField<double> tr = q_trace(geo.A, J, geo.frames);
      double worst = 0.0;
      for (double x : tr.data()) worst = std::max(worst, std::abs(x));
      CHECK(worst < 1e-10);
      // Random orthonormal basis by QR.
      Mat G(p.ambient_dim, p.ambient_dim);
      for (int c = 0; c < p.ambient_dim; ++c) G.col(c) = random_unit(p.ambient_dim, rng);
      const Mat Q = Eigen::HouseholderQR<Mat>(G).householderQ();
      tr = q_trace(geo.A, J, geo.frames, Q);
      worst = 0.0;
      for (double x : tr.data()) worst = std::max(worst, std::abs(x));
      CHECK(worst < 1e-10);
    }
  }
}

TEST_CASE("q: direct form, matrix form and the A+/A- forms agree") {
  std::mt19937_64 rng(8);
  for (const char* name : {"holo_graph", "catenoid_r6", "enneper_r6"}) {
    CAPTURE(name);
    const ImmersionPatch p = builtin_surface(name);
    const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(17));
    const GridField<Mat> J = p.normal_hint == NormalStructureHint::ambient_restriction
                                 ? ambient_restriction_JN(geo.frames, standard_ambient_J(p.ambient_dim)).J
                                 : constant_JN(geo.frames, standard_block_J(geo.frames.normal_rank)).J;
    const ApmTensors apm = apm_decompose(geo.A, J);
    for (int t = 0; t < 12; ++t) {
      const Vec a = random_unit(p.ambient_dim, rng);
      const GridField<double> q = q_direct(a, geo.A, J, geo.frames);
      const QViaApm via = q_via_apm(a, apm, J, geo.frames);
      CHECK(max_abs_diff(q, via.general) < 1e-12);
      CHECK(max_abs_diff(q, via.surface) < 1e-12);
      CHECK(max_abs_diff(q, via.surface_tau2) < 1e-12);
      const int i = 5, j = 11;
      const Mat Q = q_matrix(geo.A(i, j), J(i, j), geo.frames.nu(i, j));
      CHECK(std::abs(a.dot(Q * a) - q(i, j)) < 1e-12);
      CHECK((Q - Q.transpose()).norm() < 1e-12);
    }
  }
}

TEST_CASE("holomorphic graphs have q = 0") {
  const ImmersionPatch p = builtin_surface("holo_graph", {{"p", "z^3"}});
  const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(17));
  const GridField<Mat> J = ambient_restriction_JN(geo.frames, standard_ambient_J(4)).J;
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t) {
    const GridField<double> q = q_direct(random_unit(4, rng), geo.A, J, geo.frames);
    for (double x : q.data()) CHECK(std::abs(x) < 1e-12);
  }
}

TEST_CASE("a_perp is a Jacobi field and satisfies the first-derivative identity") {
  for (const char* name : {"catenoid_r6", "holo_graph", "enneper_r6"}) {
    CAPTURE(name);
    const ImmersionPatch p = builtin_surface(name);
    std::mt19937_64 rng(4);
    const Vec a = random_unit(p.ambient_dim, rng);
    std::vector<double> h, jac, first;
    for (int n : {33, 65, 129}) {
      const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(n));
      h.push_back(geo.frames.domain.hu());
      jac.push_back(max_norm(jacobi_operator(normal_projection_constant(a, geo.frames), geo.frames, geo.A)));
      first.push_back(first_derivative_identity_residual(a, geo.frames, geo.A));
    }
    CHECK(assess_order(h, jac).pass);
    CHECK(assess_order(h, first).pass);
  }
}

TEST_CASE("flat second variation of f nu_1 is the Dirichlet energy of f") {
  const ImmersionPatch p = builtin_surface("plane_k");
  // Reference energy by a fine midpoint rule on the bump support.
  const ChartFunction f = bump_function(0.05, -0.05, 0.85, 0.8);
  double exact = 0.0;
  {
    const int m = 4000;
    const double a0 = 0.05 - 0.85, b0 = -0.05 - 0.8, du = 1.7 / m, dv = 1.6 / m;
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) exact += f.gradient(a0 + (i + 0.5) * du, b0 + (j + 0.5) * dv).squaredNorm() * du * dv;
    }
  }
  std::vector<double> h, err;
  for (int n : {33, 65, 129}) {
    const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(n));
    const GridField<double> fv = sample(f, geo.frames.domain);
    NormalTensorField s(0, geo.frames.domain, 0, 2);
    for (int j = 0; j < fv.nv(); ++j) {
      for (int i = 0; i < fv.nu(); ++i) s(i, j)(0, 0) = fv(i, j);
    }
    h.push_back(geo.frames.domain.hu());
    err.push_back(std::abs(second_variation_direct(s, geo.frames, geo.A) - exact));
  }
  CHECK(err.back() / exact < 1e-3);
  CHECK(assess_order(h, err).pass);
}

TEST_CASE("cutoff identity discrepancy converges") {
  const ImmersionPatch p = builtin_surface("catenoid_r6");
  std::vector<double> h, disc;
  for (int n : {33, 65, 129}) {
    const ChartDomain g = p.domain.with_resolution(n);
    const SurfaceGeometry geo = build_geometry(p, g);
    const NormalTensorField s = project_ambient_field(geo.frames, random_ambient_field(6, 9));
    const CutoffIdentity c = second_variation_cutoff_identity(centered_bump(g), s, geo.frames, geo.A);
    CHECK(std::abs(c.lhs) > 1e-3);
    h.push_back(g.hu());
    disc.push_back(c.discrepancy);
  }
  CHECK(assess_order(h, disc).pass);
}

TEST_CASE("the default cutoff clears the boundary stencils") {
  for (int n : {17, 33, 65}) {
    const ChartDomain g = ChartDomain{}.with_resolution(n);
    const GridField<double> f = sample(centered_bump(g), g);
    for (int j = 0; j < g.nv; ++j) {
      for (int i = 0; i < g.nu; ++i) {
        const bool edge = std::min({i, j, g.nu - 1 - i, g.nv - 1 - j}) < 2 * kStencilRadius;
        if (edge) CHECK(f(i, j) == 0.0);
      }
    }
    CHECK(f((g.nu - 1) / 2, (g.nv - 1) / 2) == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(centered_bump(ChartDomain{}.with_resolution(9)), GridTooCoarse);
}

TEST_CASE("second variation rejects sections touching the boundary") {
  const ImmersionPatch p = builtin_surface("plane_k");
  const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(17));
  NormalTensorField s(0, geo.frames.domain, 0, 2);
  s(1, 8)(0, 0) = 1.0;
  CHECK_THROWS_AS(second_variation_direct(s, geo.frames, geo.A), SupportTouchesBoundary);
}
