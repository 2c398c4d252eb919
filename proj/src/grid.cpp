#include "minsurf/grid.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "minsurf/parallel.hpp"

namespace minsurf {

void ChartDomain::validate() const {
  if (!(u_min < u_max) || !(v_min < v_max)) {
    throw BadParams("chart domain must satisfy u_min < u_max and v_min < v_max");
  }
  if (nu < 8 || nv < 8) {
    throw BadParams("grid resolution must be at least 8 nodes per direction (got " +
                    std::to_string(nu) + "x" + std::to_string(nv) + ")");
  }
}

double ChartDomain::extent() const { return std::max(u_max - u_min, v_max - v_min); }

bool ChartDomain::contains(double u, double v, double inset) const {
  return u >= u_min + inset && u <= u_max - inset && v >= v_min + inset && v <= v_max - inset;
}

ChartDomain ChartDomain::with_resolution(int n) const { return with_resolution(n, n); }

ChartDomain ChartDomain::with_resolution(int n_u, int n_v) const {
  ChartDomain d = *this;
  d.nu = n_u;
  d.nv = n_v;
  d.validate();
  return d;
}

int thread_count() {
  if (const char* env = std::getenv("MINSURF_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace minsurf
