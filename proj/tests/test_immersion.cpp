#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "minsurf/convergence.hpp"
#include "minsurf/immersion.hpp"

using namespace minsurf;

TEST_CASE("catalog lists the built-in surfaces") {
  const auto names = catalog_names();
  for (const char* n : {"plane_k", "holo_graph", "catenoid_r6", "enneper_r6", "perturbed_graph"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
  for (const auto& n : names) CHECK_NOTHROW(builtin_surface(n));
}

TEST_CASE("unknown surfaces and bad parameters are rejected") {
  CHECK_THROWS_AS(builtin_surface("torus"), UnknownSurface);
  CHECK_THROWS_AS(builtin_surface("catenoid_r6", {{"tmax", "-1"}}), BadParams);
  CHECK_THROWS_AS(builtin_surface("catenoid_r6", {{"tmax", "two"}}), BadParams);
  CHECK_THROWS_AS(builtin_surface("plane_k", {{"radius", "1"}}), BadParams);
  CHECK_THROWS_AS(builtin_surface("plane_k", {{"k", "0"}}), BadParams);
}

TEST_CASE("holo_graph z^2 is (z, z^2) in R^4") {
  const ImmersionPatch p = builtin_surface("holo_graph", {{"p", "z^2"}});
  REQUIRE(p.ambient_dim == 4);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-0.9, 0.9);
  for (int t = 0; t < 20; ++t) {
    const double u = uni(rng), v = uni(rng);
    const Jet3 jet = evaluate_jet(p, u, v, 3);
    Vec F(4), Fu(4), Fv(4), Fuu(4);
    F << u, v, u * u - v * v, 2 * u * v;
    Fu << 1, 0, 2 * u, 2 * v;
    Fv << 0, 1, -2 * v, 2 * u;
    Fuu << 0, 0, 2, 0;
    CHECK((jet.F - F).norm() < 1e-14);
    CHECK((jet.Fu - Fu).norm() < 1e-14);
    CHECK((jet.Fv - Fv).norm() < 1e-14);
    CHECK((jet.Fuu - Fuu).norm() < 1e-14);
    CHECK(jet.third[0].norm() < 1e-14);
  }
}

TEST_CASE("complex polynomials parse and differentiate") {
  const ComplexPolynomial p = ComplexPolynomial::parse("0.5*z^3 - 2i*z + 1");
  using C = std::complex<double>;
  const auto& c = p.coefficients();
  REQUIRE(c.size() == 4);
  CHECK(std::abs(c[0] - C(1, 0)) < 1e-15);
  CHECK(std::abs(c[1] - C(0, -2)) < 1e-15);
  CHECK(std::abs(c[2]) < 1e-15);
  CHECK(std::abs(c[3] - C(0.5, 0)) < 1e-15);
  // Holomorphic: the complex difference quotient along any direction agrees.
  const C z(0.3, -0.7);
  for (const C dir : {C(1, 0), C(0, 1), C(0.6, 0.8)}) {
    const double h = 1e-6;
    const C fd = (p(z + h * dir) - p(z - h * dir)) / (2.0 * h * dir);
    CHECK(std::abs(fd - p.derivative(1, z)) < 1e-8);
  }
  CHECK(std::abs(p.derivative(3, z) - C(3, 0)) < 1e-14);
  CHECK_THROWS_AS(ComplexPolynomial::parse("z^"), BadParams);
}

TEST_CASE("difference jets converge to analytic jets at second order") {
  std::mt19937_64 rng(11);
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const ImmersionPatch base = builtin_surface(name);
    const ChartDomain& d = base.domain;
    std::uniform_real_distribution<double> uu(d.u_min + 0.1 * (d.u_max - d.u_min), d.u_max - 0.1 * (d.u_max - d.u_min));
    std::uniform_real_distribution<double> vv(d.v_min + 0.1 * (d.v_max - d.v_min), d.v_max - 0.1 * (d.v_max - d.v_min));
    std::vector<std::pair<double, double>> pts;
    for (int t = 0; t < 8; ++t) pts.emplace_back(uu(rng), vv(rng));
    auto discrepancy = [&](double step) {
      ImmersionPatch fd = base;
      fd.jet = JetSpec{JetMode::finite_difference, step};
      double worst = 0.0;
      for (const auto& [u, v] : pts) {
        const Jet3 a = evaluate_jet(base, u, v, 2), b = evaluate_jet(fd, u, v, 2);
        worst = std::max({worst, (a.Fu - b.Fu).norm(), (a.Fv - b.Fv).norm(), (a.Fuu - b.Fuu).norm(),
                          (a.Fuv - b.Fuv).norm(), (a.Fvv - b.Fvv).norm()});
      }
      return worst;
    };
    const double h = 0.02 * d.extent();
    const OrderAssessment o = assess_order({h, h / 2, h / 4}, {discrepancy(h), discrepancy(h / 2), discrepancy(h / 4)});
    CAPTURE(o.order);
    CHECK(o.pass);
  }
}

TEST_CASE("every catalog chart has full rank") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const ImmersionPatch p = builtin_surface(name);
    const ChartDomain g = p.domain.with_resolution(33);
    double smallest = 1e300;
    for (int j = 0; j < g.nv; ++j) {
      for (int i = 0; i < g.nu; ++i) smallest = std::min(smallest, jacobian_min_singular_value(evaluate_jet(p, g.u(i), g.v(j), 1)));
    }
    CHECK(smallest >= kRankTol);
  }
}

TEST_CASE("points outside the domain are rejected") {
  const ImmersionPatch p = builtin_surface("catenoid_r6");
  CHECK_THROWS_AS(evaluate_jet(p, 100.0, 0.0, 2), PointOutsideDomain);
}
