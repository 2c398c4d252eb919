#include "minsurf/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minsurf/error.hpp"

namespace minsurf {

double fitted_order(const std::vector<double>& h, const std::vector<double>& r) {
  if (h.size() != r.size() || h.size() < 2) throw Error("order fit needs at least two resolutions");
  const double n = static_cast<double>(h.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double x = std::log(h[k]);
    const double y = std::log(std::max(r[k], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

OrderAssessment assess_order(const std::vector<double>& h, const std::vector<double>& r, double min_order,
                             double floor) {
  OrderAssessment out;
  out.order = fitted_order(h, r);
  out.at_floor = std::all_of(r.begin(), r.end(), [&](double x) { return std::abs(x) <= floor; });
  out.pass = out.at_floor || out.order >= min_order;
  return out;
}

bool non_decaying(double coarse, double fine, double tol) { return fine >= 0.5 * coarse && fine > 10.0 * tol; }

}  // namespace minsurf
