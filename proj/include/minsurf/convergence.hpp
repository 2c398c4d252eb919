#pragma once

#include <vector>

namespace minsurf {

inline constexpr double kMinOrder = 1.9;
// Residuals at or below this are treated as exact.
inline constexpr double kRoundoffFloor = 1e-10;

// Least-squares slope of log r against log h.
double fitted_order(const std::vector<double>& h, const std::vector<double>& r);

struct OrderAssessment {
  double order = 0.0;
  bool at_floor = false;  // every residual at or below the floor
  bool pass = false;
};
OrderAssessment assess_order(const std::vector<double>& h, const std::vector<double>& r,
                             double min_order = kMinOrder, double floor = kRoundoffFloor);

// A residual that should vanish but does not: the finer value keeps at least half of the
// coarser one and stays well above the tolerance.
bool non_decaying(double coarse, double fine, double tol);

}  // namespace minsurf
