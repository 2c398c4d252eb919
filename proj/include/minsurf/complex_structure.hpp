#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minsurf/frames.hpp"

namespace minsurf {

// J_Sigma in the frame (tau_1, tau_2): tau_1 -> tau_2, tau_2 -> -tau_1.
Eigen::Matrix2d canonical_JSigma();
// The same map in ambient coordinates at a node: T J T^T.
Mat JSigma_ambient(const FramePackage& frames, int i, int j);

// Normal complex structure as an r x r matrix field in the normal frame.
struct NormalComplexStructure {
  GridField<Mat> J;
  std::string source;
};

struct AxiomReport {
  double orthogonality = 0.0;  // max |J^T J - I|_F
  double square = 0.0;         // max |J^2 + I|_F
  double parallelism = 0.0;    // max |d_i J + [theta_i, J]|_F away from the boundary
};

AxiomReport check_JN_axioms(const GridField<Mat>& J, const FramePackage& frames);

// Standard block structure nu_1 -> nu_2, nu_3 -> nu_4, ... of size r.
Mat standard_block_J(int r);
// Nearest orthogonal antisymmetric matrix (polar factor of the antisymmetric part).
Mat nearest_complex_structure(const Mat& X);
// The standard ambient structure e_{2j-1} -> e_{2j} of size n.
Mat standard_ambient_J(int n);

NormalComplexStructure constant_JN(const FramePackage& frames, const Mat& J);
// Polar factor of N^T Jbar N at every node.
NormalComplexStructure ambient_restriction_JN(const FramePackage& frames, const Mat& Jbar);
// Orthogonal complex structure drawn independently at each node (not parallel).
NormalComplexStructure random_pointwise_JN(const FramePackage& frames, unsigned seed);

// J X = J_Sigma X^T + sign * J_N X^perp as an ambient matrix field.
GridField<Mat> pullback_J(const FramePackage& frames, const GridField<Mat>& JN, double sign = 1.0);

// Transport of normal-frame coefficients between adjacent grid nodes.
class NormalTransport {
 public:
  virtual ~NormalTransport() = default;
  virtual const ChartDomain& domain() const = 0;
  virtual int rank() const = 0;
  // Nodes at least this far from the boundary may be visited.
  virtual int margin() const = 0;
  // Matrix P with s(b) = P s(a) for a parallel section, a and b adjacent nodes.
  virtual Mat segment(int i0, int j0, int i1, int j1) const = 0;
  // Curvature of the connection at a node in the local frame, if available.
  virtual std::optional<Mat> curvature(int i, int j) const = 0;
};

// RK4 integration of dP/ds = -theta(gamma') P with theta interpolated along grid lines.
class ThetaTransport : public NormalTransport {
 public:
  ThetaTransport(GridField<ChartPair> theta_chart, int substeps = 1);
  const ChartDomain& domain() const override { return theta_.domain(); }
  int rank() const override { return rank_; }
  int margin() const override { return theta_.margin(); }
  Mat segment(int i0, int j0, int i1, int j1) const override;
  std::optional<Mat> curvature(int i, int j) const override;
  int substeps() const { return substeps_; }

 private:
  Mat theta_at(int c, int line, double x) const;

  GridField<ChartPair> theta_;
  GridField<Mat> curvature_;
  int rank_;
  int substeps_;
};

// Transport of the ambient normal vectors by dX/dt = (dPi/dt) X with Pi the normal
// projector, using jets of the immersion; curvature from the Ricci equation.
class AmbientTransport : public NormalTransport {
 public:
  AmbientTransport(const ImmersionPatch& patch, const FramePackage& frames, const NormalTensorField& A,
                   int substeps = 8);
  const ChartDomain& domain() const override { return frames_->domain; }
  int rank() const override { return frames_->normal_rank; }
  int margin() const override { return 0; }
  Mat segment(int i0, int j0, int i1, int j1) const override;
  std::optional<Mat> curvature(int i, int j) const override;

 private:
  const ImmersionPatch* patch_;
  const FramePackage* frames_;
  const NormalTensorField* A_;
  int substeps_;
};

// Vertices of a closed grid polygon; consecutive vertices share a row or column.
using GridLoop = std::vector<std::pair<int, int>>;

Mat parallel_transport_normal(const NormalTransport& transport, const GridLoop& loop);
GridLoop rectangle_loop(int i0, int j0, int i1, int j1);

struct HolonomyOptions {
  int loop_samples = 8;       // rectangle corners per direction
  int curvature_samples = 8;  // curvature nodes per direction
  double null_tol = 1e-6;     // relative singular-value threshold
  int random_seeds = 16;
};

struct LoopRecord {
  int i1 = 0, j1 = 0;  // opposite corner of the anchored rectangle
  Mat holonomy;
  double orthogonality = 0.0;
};

struct HolonomyResult {
  bool found = false;
  int base_i = 0, base_j = 0;
  int commutant_dim = 0;
  Vec singular_values;              // of the stacked commutator operator, descending
  double antisymmetric_sigma_min = 0.0;  // smallest singular value on antisymmetric matrices / max(largest, 1)
  double commutation_residual = 0.0;     // of the returned J at the base point, relative
  Mat J_base;
  NormalComplexStructure JN;
  std::vector<LoopRecord> loops;
  int curvature_count = 0;
};

HolonomyResult find_parallel_JN(const NormalTransport& transport, const HolonomyOptions& options = {});

// Connection on the trivial rank-4 bundle over a chart with generic so(4)-valued theta.
struct SyntheticConnection {
  GridField<ChartPair> theta_chart;
};
SyntheticConnection synthetic_connection(const std::string& name, const ChartDomain& domain);

}  // namespace minsurf
