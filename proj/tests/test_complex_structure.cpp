#include <doctest.h>

#include <cmath>
#include <random>

#include "minsurf/complex_structure.hpp"

using namespace minsurf;

namespace {

bool is_complex_structure(const Mat& J, double tol) {
  const int r = static_cast<int>(J.rows());
  return (J.transpose() * J - Mat::Identity(r, r)).norm() < tol && (J * J + Mat::Identity(r, r)).norm() < tol;
}

// Polar factor of N^T Jbar N by SVD, computed here rather than through the library.
Mat restricted_polar(const Mat& N, const Mat& Jbar) {
  const Mat X = N.transpose() * Jbar * N;
  Eigen::JacobiSVD<Mat> svd(X, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

std::vector<Mat> so_basis(int r) {
  std::vector<Mat> out;
  for (int a = 0; a < r; ++a) {
    for (int b = a + 1; b < r; ++b) {
      Mat E = Mat::Zero(r, r);
      E(a, b) = 1.0;
      E(b, a) = -1.0;
      out.push_back(E);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("standard structures are orthogonal complex structures") {
  for (int r : {2, 4, 6}) {
    CHECK(is_complex_structure(standard_block_J(r), 1e-15));
    CHECK(is_complex_structure(standard_ambient_J(r), 1e-15));
  }
  // e_1 -> e_2
  CHECK(standard_ambient_J(4)(1, 0) == 1.0);
  CHECK(canonical_JSigma()(1, 0) == 1.0);
}

TEST_CASE("nearest complex structure projects perturbations back") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    Mat J = standard_block_J(4);
    Mat noise(4, 4);
    for (int k = 0; k < 16; ++k) noise.data()[k] = 0.01 * g(rng);
    const Mat P = nearest_complex_structure(J + noise);
    CHECK(is_complex_structure(P, 1e-12));
    CHECK((P - J).norm() < 0.1);
  }
}

TEST_CASE("holonomy search on holo_graph finds the restricted ambient structure") {
  for (const ParamMap& params : {ParamMap{{"p", "z^3"}}, ParamMap{{"k", "2"}}}) {
    const ImmersionPatch p = builtin_surface("holo_graph", params);
    const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(33));
    const AmbientTransport transport(p, geo.frames, geo.A);
    const HolonomyResult h = find_parallel_JN(transport);
    REQUIRE(h.found);
    const Mat Jbar = standard_ambient_J(geo.frames.ambient_dim);
    const ChartDomain& d = geo.frames.domain;
    double plus = 0.0, minus = 0.0;
    for (int j = 0; j < d.nv; ++j) {
      for (int i = 0; i < d.nu; ++i) {
        const Mat oracle = restricted_polar(geo.frames.nu(i, j), Jbar);
        plus = std::max(plus, (h.JN.J(i, j) - oracle).norm());
        minus = std::max(minus, (h.JN.J(i, j) + oracle).norm());
      }
    }
    CHECK(std::min(plus, minus) < 1e-6);
    const AxiomReport ax = check_JN_axioms(h.JN.J, geo.frames);
    CHECK(ax.orthogonality < 1e-10);
    CHECK(ax.square < 1e-10);
    CHECK(ax.parallelism < 1e-3);
  }
}

TEST_CASE("holonomy search on the catenoid succeeds with a large commutant") {
  const ImmersionPatch p = builtin_surface("catenoid_r6");
  for (int n : {33, 65}) {
    const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(n));
    const AmbientTransport transport(p, geo.frames, geo.A);
    const HolonomyResult h = find_parallel_JN(transport);
    REQUIRE(h.found);
    // Flat normal bundle: the holonomy is trivial and every matrix commutes.
    CHECK(h.commutant_dim == 16);
    CHECK(is_complex_structure(h.J_base, 1e-10));
    for (const LoopRecord& l : h.loops) CHECK((l.holonomy - Mat::Identity(4, 4)).norm() < 1e-6);
  }
}

TEST_CASE("synthetic so(4) connection has no invariant complex structure") {
  const ChartDomain d = ChartDomain{}.with_resolution(33);
  const ThetaTransport transport(synthetic_connection("so4", d).theta_chart);
  const HolonomyOptions opt;
  const HolonomyResult h = find_parallel_JN(transport, opt);
  CHECK_FALSE(h.found);
  CHECK(h.antisymmetric_sigma_min > opt.null_tol);

  // Brute force: stack [H, X] over sampled loops for X in a basis of so(4).
  std::vector<Mat> hol;
  for (int a = 1; a <= 4; ++a) {
    for (int b = 1; b <= 4; ++b) hol.push_back(parallel_transport_normal(transport, rectangle_loop(16, 16, 16 + 3 * a, 16 - 3 * b)));
  }
  const auto basis = so_basis(4);
  Mat op(static_cast<int>(hol.size()) * 16, static_cast<int>(basis.size()));
  for (std::size_t c = 0; c < basis.size(); ++c) {
    for (std::size_t k = 0; k < hol.size(); ++k) {
      const Mat comm = hol[k] * basis[c] - basis[c] * hol[k];
      op.block(static_cast<int>(k) * 16, static_cast<int>(c), 16, 1) = Eigen::Map<const Vec>(comm.data(), 16);
    }
  }
  const Vec sv = Eigen::JacobiSVD<Mat>(op).singularValues();
  CHECK(sv(sv.size() - 1) / sv(0) > 1e-3);
  CHECK_THROWS_AS(synthetic_connection("so5", d), BadParams);
}

TEST_CASE("the pulled-back structure squares to -1") {
  const ImmersionPatch p = builtin_surface("holo_graph", {{"k", "2"}});
  const SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(17));
  const GridField<Mat> JN = ambient_restriction_JN(geo.frames, standard_ambient_J(6)).J;
  for (double sign : {1.0, -1.0}) {
    const GridField<Mat> J = pullback_J(geo.frames, JN, sign);
    double worst = 0.0;
    for (const Mat& x : J.data()) worst = std::max(worst, (x * x + Mat::Identity(6, 6)).norm() + (x.transpose() * x - Mat::Identity(6, 6)).norm());
    CHECK(worst < 1e-12);
  }
  // For the holomorphic graph the + pull-back is the standard ambient structure.
  const GridField<Mat> J = pullback_J(geo.frames, JN, 1.0);
  double dist = 0.0;
  for (const Mat& x : J.data()) dist = std::max(dist, std::min((x - standard_ambient_J(6)).norm(), (x + standard_ambient_J(6)).norm()));
  CHECK(dist < 1e-10);
}

TEST_CASE("a pointwise random structure is not parallel") {
  const ImmersionPatch p = builtin_surface("holo_graph", {{"k", "2"}});
  SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(17));
  const NormalComplexStructure J = random_pointwise_JN(geo.frames, 3);
  const AxiomReport ax = check_JN_axioms(J.J, geo.frames);
  CHECK(ax.orthogonality < 1e-12);
  CHECK(ax.square < 1e-12);
  CHECK(ax.parallelism > 1.0);
}

TEST_CASE("transport around a loop on the plane is the identity") {
  const ImmersionPatch p = builtin_surface("plane_k", {{"k", "2"}});
  SurfaceGeometry geo = build_geometry(p, p.domain.with_resolution(17));
  const ThetaTransport t(geo.frames.theta_chart);
  const Mat H = parallel_transport_normal(t, rectangle_loop(2, 2, 12, 9));
  CHECK((H - Mat::Identity(4, 4)).norm() < 1e-14);
  CHECK_THROWS_AS(parallel_transport_normal(t, rectangle_loop(0, 0, 40, 40)), LoopLeavesDomain);
}
