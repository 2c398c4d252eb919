#pragma once

#include "minsurf/complex_structure.hpp"
#include "minsurf/variation.hpp"

namespace minsurf {

struct HoloResiduals {
  double res_b = 0.0;        // max |A(J_Sigma v, w) - J_N A(v, w)| over nodes and frame pairs
  double res_b_minus = 0.0;  // same with -J_N
  double res_a = 0.0;        // max |(d_v J) X| over interior nodes, frame directions v, frame sections X
  double res_a_minus = 0.0;
};

HoloResiduals inf_holo_residuals(const NormalTensorField& A, const FramePackage& frames, const GridField<Mat>& JN);

// Largest column norm, i.e. max over nodes and frame pairs of |T(v, w, ...)|.
double max_component_norm(const NormalTensorField& T);

struct DbarPair {
  NormalTensorField d01;  // slot 0 is the differentiation direction
  NormalTensorField d10;
};

// D^{0,1}_v T = (D_v T + J_N D_{J_Sigma v} T)/2 and D^{1,0}_v T = (D_v T - J_N D_{J_Sigma v} T)/2.
DbarPair dbar_operators(const NormalTensorField& T, const FramePackage& frames, const GridField<Mat>& JN);
// Same, given D T already.
DbarPair dbar_from_derivative(const NormalTensorField& DT, const GridField<Mat>& JN);

// (D^{0,1})^* S = -sum_i (D^{1,0}_{tau_i} S)(tau_i, ...) and (D^{1,0})^* S = -sum_i (D^{0,1}_{tau_i} S)(tau_i, ...).
NormalTensorField d01_adjoint(const NormalTensorField& S, const FramePackage& frames, const GridField<Mat>& JN);
NormalTensorField d10_adjoint(const NormalTensorField& S, const FramePackage& frames, const GridField<Mat>& JN);

struct ApmHolomorphicity {
  double res_plus = 0.0;        // max |(D^{0,1} A+)(tau, tau, tau)|
  double res_minus = 0.0;       // max |(D^{1,0} A-)(tau, tau, tau)|
  double res_plus_full = 0.0;   // full tensor norms
  double res_minus_full = 0.0;
  double intertwine = 0.0;      // max |D^{0,1}_{J v} A+ + J_N D^{0,1}_v A+|
  bool minimality_warning = false;
};

ApmHolomorphicity verify_apm_holomorphicity(const ApmTensors& apm, const NormalTensorField& A,
                                            const FramePackage& frames, const GridField<Mat>& JN,
                                            double minimality_threshold = 1e-6);

struct WeitzenbockResiduals {
  double sum_residual = 0.0;
  double diff_residual = 0.0;
};
WeitzenbockResiduals verify_weitzenbock(const NormalTensorField& T, const FramePackage& frames, const GridField<Mat>& JN);

struct APlusPdeResidual {
  double standard = 0.0;  // R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y] for R^Sigma
  double flipped = 0.0;   // opposite sign for R^Sigma
  std::string annihilating;  // "standard" or "flipped", whichever is smaller
  double value() const { return annihilating == "flipped" ? flipped : standard; }
};
APlusPdeResidual a_plus_pde_residual(const ApmTensors& apm, const CurvatureFields& curvature, const FramePackage& frames,
                                     const GridField<Mat>& JN);

struct AmbientComplexStructure {
  Mat Jbar;
  double constancy_residual = 0.0;   // max over nodes and entries of |J_ij(x) - Jbar_ij|
  double holomorphy_residual = 0.0;  // max |F_* J_Sigma - Jbar F_*|
  double projection_distance = 0.0;  // |mean - Jbar|
  double orthogonality = 0.0;        // |Jbar^T Jbar - I|
  double square = 0.0;               // |Jbar^2 + I|
};

enum class Orientation { plus, minus };
AmbientComplexStructure reconstruct_ambient_J(const FramePackage& frames, const GridField<Mat>& JN, Orientation which);

}  // namespace minsurf
