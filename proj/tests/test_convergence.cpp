#include <doctest.h>

#include <cmath>

#include "minsurf/convergence.hpp"

using namespace minsurf;

TEST_CASE("fitted order recovers power laws") {
  const std::vector<double> h = {0.1, 0.05, 0.025};
  for (double p : {1.0, 2.0, 4.0}) {
    std::vector<double> r;
    for (double x : h) r.push_back(3.0 * std::pow(x, p));
    CHECK(fitted_order(h, r) == doctest::Approx(p).epsilon(1e-12));
  }
  // Least squares on noisy data sits between the pairwise slopes.
  const std::vector<double> r = {1e-2, 2.4e-3, 6.5e-4};
  const double o = fitted_order(h, r);
  CHECK(o > std::log2(2.4e-3 / 6.5e-4) - 1e-12);
  CHECK(o < std::log2(1e-2 / 2.4e-3) + 1e-12);
}

TEST_CASE("order assessment") {
  const std::vector<double> h = {0.1, 0.05, 0.025};
  CHECK(assess_order(h, {1e-2, 2.5e-3, 6.25e-4}).pass);
  CHECK_FALSE(assess_order(h, {1e-2, 5e-3, 2.5e-3}).pass);
  const OrderAssessment floor = assess_order(h, {3e-14, 5e-14, 2e-14});
  CHECK(floor.at_floor);
  CHECK(floor.pass);
  // A flat residual above the floor fails.
  CHECK_FALSE(assess_order(h, {1e-9, 1e-9, 1e-9}).pass);
  CHECK(std::isfinite(assess_order(h, {0.0, 0.0, 0.0}).order));
}

TEST_CASE("non-decay") {
  CHECK(non_decaying(0.8, 0.8, 1e-6));
  CHECK(non_decaying(0.8, 0.41, 1e-6));
  CHECK_FALSE(non_decaying(0.8, 0.2, 1e-6));
  CHECK_FALSE(non_decaying(1e-8, 1e-8, 1e-6));
}
