#include <doctest.h>

#include <cmath>

#include "minsurf/complex_structure.hpp"
#include "minsurf/convergence.hpp"
#include "minsurf/holo.hpp"
#include "minsurf/variation.hpp"

using namespace minsurf;

namespace {

GridField<Mat> catalog_J(const ImmersionPatch& p, const FramePackage& fr) {
  return p.normal_hint == NormalStructureHint::ambient_restriction
             ? ambient_restriction_JN(fr, standard_ambient_J(p.ambient_dim)).J
             : constant_JN(fr, standard_block_J(fr.normal_rank)).J;
}

// A(tau_a, tau_b) column for the rank-2 layout.
Vec col(const Mat& A, int a, int b) { return A.col(2 * a + b); }

}  // namespace

TEST_CASE("A+ and A- match the hand-written split and intertwine J") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const ImmersionPatch p = builtin_surface(name);
    const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(17));
    const GridField<Mat> J = catalog_J(p, geo.frames);
    const ApmTensors apm = apm_decompose(geo.A, J);
    const ChartDomain& d = geo.frames.domain;
    double split = 0.0, inter = 0.0;
    for (int j = 0; j < d.nv; ++j) {
      for (int i = 0; i < d.nu; ++i) {
        const Mat& A = geo.A(i, j);
        const Mat& JN = J(i, j);
        // J_Sigma tau_1 = tau_2, J_Sigma tau_2 = -tau_1.
        auto A_rot = [&](int a, int b) -> Vec { return a == 0 ? col(A, 1, b) : Vec(-col(A, 0, b)); };
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            const Vec plus = 0.5 * (col(A, a, b) - JN * A_rot(a, b));
            const Vec minus = 0.5 * (col(A, a, b) + JN * A_rot(a, b));
            split = std::max({split, (plus - col(apm.plus(i, j), a, b)).norm(), (minus - col(apm.minus(i, j), a, b)).norm()});
          }
        }
        // A+(J tau_1, tau_b) = J_N A+(tau_1, tau_b), A-(J tau_1, tau_b) = -J_N A-(tau_1, tau_b).
        for (int b = 0; b < 2; ++b) {
          inter = std::max(inter, (col(apm.plus(i, j), 1, b) - JN * col(apm.plus(i, j), 0, b)).norm());
          inter = std::max(inter, (col(apm.minus(i, j), 1, b) + JN * col(apm.minus(i, j), 0, b)).norm());
        }
      }
    }
    CHECK(split < 1e-14);
    CHECK(inter < 1e-12);
  }
}

TEST_CASE("res_b equals twice the largest |A-|") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const ImmersionPatch p = builtin_surface(name);
    const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(33));
    const GridField<Mat> J = catalog_J(p, geo.frames);
    const ApmTensors apm = apm_decompose(geo.A, J);
    const HoloResiduals r = inf_holo_residuals(geo.A, geo.frames, J);
    CHECK(std::abs(r.res_b - 2.0 * max_component_norm(apm.minus)) < 1e-12);
    CHECK(std::abs(r.res_b_minus - 2.0 * max_component_norm(apm.plus)) < 1e-12);
  }
}

TEST_CASE("holomorphic graph: A- vanishes and the ambient structure is recovered") {
  const ImmersionPatch p = builtin_surface("holo_graph", {{"p", "z^2"}});
  const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(33));
  const GridField<Mat> J = catalog_J(p, geo.frames);
  const ApmTensors apm = apm_decompose(geo.A, J);
  CHECK(max_norm(apm.minus) < 1e-12);
  CHECK(max_norm(apm.plus) > 0.5);
  const AmbientComplexStructure jb = reconstruct_ambient_J(geo.frames, J, Orientation::plus);
  CHECK(jb.constancy_residual < 1e-12);
  CHECK(jb.holomorphy_residual < 1e-12);
  CHECK(std::min((jb.Jbar - standard_ambient_J(4)).norm(), (jb.Jbar + standard_ambient_J(4)).norm()) < 1e-12);
}

TEST_CASE("catenoid waist: |A+| = |A-| = 1/2 and no constant ambient structure") {
  const ImmersionPatch p = builtin_surface("catenoid_r6");
  const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(33));
  const GridField<Mat> J = catalog_J(p, geo.frames);
  const ApmTensors apm = apm_decompose(geo.A, J);
  CHECK(apm.plus(16, 16).col(0).norm() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(apm.minus(16, 16).col(0).norm() == doctest::Approx(0.5).epsilon(1e-12));
  const AmbientComplexStructure jb = reconstruct_ambient_J(geo.frames, J, Orientation::plus);
  CHECK(jb.constancy_residual > 0.1);
}

TEST_CASE("D01 A+ and D10 A- vanish under refinement on minimal surfaces") {
  for (const char* name : {"holo_graph", "catenoid_r6", "enneper_r6"}) {
    CAPTURE(name);
    const ImmersionPatch p = builtin_surface(name);
    std::vector<double> h, plus, minus;
    for (int n : {33, 65, 129}) {
      SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(n));
      const GridField<Mat> J = catalog_J(p, geo.frames);
      const ApmTensors apm = apm_decompose(geo.A, J);
      const ApmHolomorphicity r = verify_apm_holomorphicity(apm, geo.A, geo.frames, J);
      CHECK_FALSE(r.minimality_warning);
      h.push_back(geo.frames.domain.hu());
      plus.push_back(r.res_plus_full);
      minus.push_back(r.res_minus_full);
    }
    CHECK(assess_order(h, plus).pass);
    CHECK(assess_order(h, minus).pass);
  }
}

TEST_CASE("Weitzenbock identities hold for random tensors") {
  const ImmersionPatch p = builtin_surface("holo_graph", {{"k", "2"}});
  SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(33));
  const GridField<Mat> J = catalog_J(p, geo.frames);
  for (unsigned seed : {1u, 2u, 3u}) {
    const NormalTensorField T = random_tensor_field(geo.frames, 2, seed);
    const WeitzenbockResiduals w = verify_weitzenbock(T, geo.frames, J);
    CHECK(w.sum_residual < 1e-9);
    CHECK(w.diff_residual < 1e-9);
  }
}

TEST_CASE("A+ PDE residual converges and picks one curvature sign") {
  const ImmersionPatch p = builtin_surface("holo_graph", {{"p", "z^3"}});
  std::vector<double> h, r;
  for (int n : {33, 65, 129}) {
    const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(n));
    const GridField<Mat> J = catalog_J(p, geo.frames);
    const APlusPdeResidual res = a_plus_pde_residual(apm_decompose(geo.A, J), geo.curvature, geo.frames, J);
    CHECK(res.annihilating == "standard");
    CHECK(res.flipped > 10.0 * res.standard);
    h.push_back(geo.frames.domain.hu());
    r.push_back(res.value());
  }
  CHECK(assess_order(h, r).pass);
}
