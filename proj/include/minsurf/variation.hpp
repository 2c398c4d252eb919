#pragma once

#include <functional>

#include "minsurf/complex_structure.hpp"
#include "minsurf/frames.hpp"

namespace minsurf {

// Scalar function on the chart with its chart gradient.
struct ChartFunction {
  std::function<double(double, double)> value;
  std::function<Eigen::Vector2d(double, double)> gradient;
};

// exp(1 - 1/(1 - x^2)) exp(1 - 1/(1 - y^2)) with x = (u - u0)/a, y = (v - v0)/b; zero outside.
ChartFunction bump_function(double u0, double v0, double a, double b);
// Centred bump whose half-widths are `fraction` of the domain half-widths.
ChartFunction centered_bump(const ChartDomain& domain, double fraction);
// Same with fraction min(0.74, 1 - 4.1 / half-width in cells), so the support stays
// 2 kStencilRadius cells clear of the boundary on coarse grids.
ChartFunction centered_bump(const ChartDomain& domain);

GridField<double> sample(const ChartFunction& f, const ChartDomain& domain);
// |grad f|^2 in the induced metric.
GridField<double> gradient_norm_sq(const ChartFunction& f, const FramePackage& frames);

// Rank-0 normal field nu^T w(u, v).
NormalTensorField project_ambient_field(const FramePackage& frames, const std::function<Vec(double, double)>& w);
// Smooth ambient field with a few random Fourier modes per coordinate.
std::function<Vec(double, double)> random_ambient_field(int n, unsigned seed, int modes = 3);
// Rank-2 normal tensor whose components are projections of smooth random ambient fields.
NormalTensorField random_tensor_field(const FramePackage& frames, int rank, unsigned seed);

NormalTensorField normal_projection_constant(const Vec& a, const FramePackage& frames);

// max over interior nodes and i of |D_{tau_i} a^perp + A(tau_i, a^T)|.
double first_derivative_identity_residual(const Vec& a, const FramePackage& frames, const NormalTensorField& A);

// D*D s - sum_ij <A_ij, s> A_ij, 2 kStencilRadius cells in from the boundary.
NormalTensorField jacobi_operator(const NormalTensorField& s, const FramePackage& frames, const NormalTensorField& A);
// D*D = -sum_i D^2_{tau_i, tau_i}.
NormalTensorField rough_laplacian(const NormalTensorField& T, const FramePackage& frames);

// q(a) = |A^{a perp}|^2 - |A^{J a perp}|^2 per node.
GridField<double> q_direct(const Vec& a, const NormalTensorField& A, const GridField<Mat>& JN, const FramePackage& frames);
// sum_i q(b_i) over the columns of an orthonormal basis (standard basis when empty).
GridField<double> q_trace(const NormalTensorField& A, const GridField<Mat>& JN, const FramePackage& frames,
                          const Mat& basis = Mat());
// Ambient matrix of the quadratic form q at a node: q(a) = a^T Q a.
Mat q_matrix(const Mat& A_at_point, const Mat& J, const Mat& N);

struct ApmTensors {
  NormalTensorField plus;
  NormalTensorField minus;
};

// A^{+/-} = (A -/+ J_N A(J_Sigma ., .)) / 2.
ApmTensors apm_decompose(const NormalTensorField& A, const GridField<Mat>& JN);

struct QViaApm {
  GridField<double> general;   // 4 sum_ij <A+_ij, a^perp><A-_ij, a^perp>
  GridField<double> surface;   // single-vector form with tau = tau_1
  GridField<double> surface_tau2;
};
QViaApm q_via_apm(const Vec& a, const ApmTensors& apm, const GridField<Mat>& JN, const FramePackage& frames);

struct DichotomyField {
  GridField<double> m;        // min(|A+(tau,tau)|, |A-(tau,tau)|)
  GridField<double> c;        // |xi+|^2 |xi-|^2 + <xi+, xi->^2 + <xi+, J xi->^2
  GridField<double> q_norm;   // operator norm of the ambient q matrix
  GridField<double> c_bound;  // |xi+| |xi-| q_norm / 4
};
DichotomyField polarized_dichotomy_check(const ApmTensors& apm, const NormalTensorField& A, const GridField<Mat>& JN,
                                         const FramePackage& frames);

// Area-weighted quadrature of |Ds|^2 - |A^s|^2 for s vanishing within two cells of the boundary.
double second_variation_direct(const NormalTensorField& s, const FramePackage& frames, const NormalTensorField& A);
// The two pieces separately: {integral |Ds|^2, integral |A^s|^2}.
std::pair<double, double> second_variation_parts(const NormalTensorField& s, const FramePackage& frames,
                                                 const NormalTensorField& A);

struct CutoffIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double discrepancy = 0.0;
};
CutoffIdentity second_variation_cutoff_identity(const ChartFunction& f, const NormalTensorField& s,
                                                const FramePackage& frames, const NormalTensorField& A);

// Pointwise product f s.
NormalTensorField multiply(const GridField<double>& f, const NormalTensorField& s);

}  // namespace minsurf
