#pragma once

#include <array>

#include <Eigen/Dense>

#include "minsurf/grid.hpp"
#include "minsurf/immersion.hpp"
#include "minsurf/tensor_field.hpp"

namespace minsurf {

inline constexpr double kMetricTol = 1e-8;

using ChartPair = std::array<Mat, 2>;                  // (u, v) components of a matrix-valued 1-form
using Mat2Pair = std::array<Eigen::Matrix2d, 2>;

// Oriented orthonormal frames on the grid.  E maps chart derivatives to the
// tangent frame: tau_i = sum_c E(i, c) d_c F.
struct FramePackage {
  ChartDomain domain;
  int ambient_dim = 0;
  int normal_rank = 0;

  GridField<Jet3> jets;
  GridField<Mat> tau;  // n x 2
  GridField<Mat> nu;   // n x r, gauge-continued
  GridField<Eigen::Matrix2d> metric;
  GridField<Eigen::Matrix2d> E;
  GridField<double> area;  // sqrt(det g)

  // Connection coefficients, valid one cell in from the boundary and fourth-order
  // accurate from kStencilRadius cells in.
  // theta[i](beta, alpha) = <D_{tau_i} nu_alpha, nu_beta>, gamma[i](l, j) = <nabla_{tau_i} tau_j, tau_l>;
  // the *_chart variants use d/du, d/dv instead of tau_1, tau_2.
  GridField<ChartPair> theta_chart;
  GridField<ChartPair> theta;
  GridField<Mat2Pair> gamma_chart;
  GridField<Mat2Pair> gamma;

  double gauge_min_overlap = 1.0;  // smallest singular value met while aligning neighbours

  bool has_connection() const { return theta.data().size() > 0; }
};

// Normal curvature F^D(tau_1, tau_2) and Gauss curvature, 2 kStencilRadius cells in from the boundary.
struct CurvatureFields {
  GridField<Mat> FD;
  GridField<double> K;
};

// Jets, metric, tangent frame and gauge-continued normal frame.
FramePackage compute_frames(const ImmersionPatch& patch, const ChartDomain& grid, double metric_tol = kMetricTol);

// A(tau_i, tau_j) in the normal frame as a rank-2 normal tensor field.
NormalTensorField second_fundamental_form(const FramePackage& frames);

// max over the grid of |A(tau_1, tau_1) + A(tau_2, tau_2)|
double minimality_residual(const NormalTensorField& A);
GridField<double> mean_curvature_norm(const NormalTensorField& A);

// Fills theta/gamma by centred differences of the frame fields.
void connection_coefficients(FramePackage& frames);

CurvatureFields curvatures(const FramePackage& frames);

// Chart curvature d_u theta_v - d_v theta_u + [theta_u, theta_v] by centred differences.
GridField<Mat> chart_curvature(const GridField<ChartPair>& theta_chart);

// Normal curvature from the second fundamental form alone (flat ambient space):
// F^D(tau_1, tau_2) = sum_i A_{1i} A_{2i}^T - A_{2i} A_{1i}^T.
Mat ricci_normal_curvature(const Mat& A_at_point);

// K and F^D from the Gauss and Ricci equations (flat ambient space), at every node.
CurvatureFields algebraic_curvatures(const NormalTensorField& A);

// Everything above in one call.
struct SurfaceGeometry {
  FramePackage frames;
  NormalTensorField A;
  CurvatureFields curvature;
};
SurfaceGeometry build_geometry(const ImmersionPatch& patch, const ChartDomain& grid, double metric_tol = kMetricTol);

// Tangential and normal parts of an ambient vector at a node.
Vec tangent_coefficients(const FramePackage& frames, int i, int j, const Vec& a);
Vec normal_coefficients(const FramePackage& frames, int i, int j, const Vec& a);

}  // namespace minsurf
