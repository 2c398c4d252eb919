#pragma once

#include <Eigen/Sparse>

#include "minsurf/variation.hpp"

namespace minsurf {

using SparseMat = Eigen::SparseMatrix<double>;

// Second variation on the interior grid nodes with zero boundary values.  Unknown
// ((j - 1)(nu - 2) + (i - 1)) r + alpha holds s^alpha at node (i, j).
struct DiscretizedJacobiForm {
  ChartDomain domain;
  int normal_rank = 0;
  SparseMat K;  // integral |Ds|^2
  SparseMat P;  // integral |A^s|^2
  SparseMat M;  // integral |s|^2
  double potential_bound = 0.0;  // max over nodes of |sum_ij A_ij A_ij^T|

  int unknowns() const { return static_cast<int>(K.rows()); }
  Vec pack(const NormalTensorField& s) const;
  NormalTensorField unpack(const Vec& x) const;
};

DiscretizedJacobiForm assemble_form(const FramePackage& frames, const NormalTensorField& A);

struct SpectrumOptions {
  double solver_tol = 1e-9;
  int max_iterations = 2000;
  int block_size = 6;
};

struct SpectrumResult {
  double lambda_min = 0.0;
  NormalTensorField eigen_section;
  int iterations = 0;
  double residual_norm = 0.0;      // |r|_{M^-1} / ((1 + |lambda|) |x|_M)
  double plain_residual = 0.0;     // |(K - P - lambda M) x| / |x|
  double shift = 0.0;
};

SpectrumResult smallest_eigenvalue(const DiscretizedJacobiForm& form, const SpectrumOptions& options = {});

struct SpecialVariation {
  double lhs = 0.0;     // second variation of f J_N a^perp by direct quadrature
  double middle = 0.0;  // integral |grad f|^2 |a^perp|^2 + f^2 q(a)
  double rhs = 0.0;     // integral |grad f|^2 + f^2 q(a)
  double slack_lhs_middle = 0.0;
  double slack_middle_rhs = 0.0;
};

SpecialVariation special_variation_inequality(const Vec& a, const ChartFunction& f, const FramePackage& frames,
                                              const NormalTensorField& A, const GridField<Mat>& JN);

// First Dirichlet eigenvalue of the flat Laplacian on the chart rectangle.
double flat_dirichlet_eigenvalue(const ChartDomain& domain);

}  // namespace minsurf
