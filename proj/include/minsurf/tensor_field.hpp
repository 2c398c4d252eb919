#pragma once

#include <functional>

#include <Eigen/Dense>

#include "minsurf/grid.hpp"

namespace minsurf {

struct FramePackage;

// Normal-bundle-valued covariant tensor of rank R on the grid.  At each node the
// value is an r x 2^R matrix: column m holds T(tau_{m_0}, ..., tau_{m_{R-1}}) in the
// normal frame, with slot 0 as the most significant bit of m.
struct NormalTensorField {
  int rank = 0;
  GridField<Eigen::MatrixXd> values;

  NormalTensorField() = default;
  NormalTensorField(int rank, const ChartDomain& domain, int margin, int normal_rank);

  int margin() const { return values.margin(); }
  bool valid(int i, int j) const { return values.valid(i, j); }
  Eigen::MatrixXd& operator()(int i, int j) { return values(i, j); }
  const Eigen::MatrixXd& operator()(int i, int j) const { return values(i, j); }
  int columns() const { return 1 << rank; }
};

inline int slot_bit(int column, int rank, int slot) { return (column >> (rank - 1 - slot)) & 1; }
inline int with_slot(int column, int rank, int slot, int value) {
  const int mask = 1 << (rank - 1 - slot);
  return value ? (column | mask) : (column & ~mask);
}

// Levi-Civita/normal covariant derivative.  The new derivative slot becomes slot 0;
// the margin grows by kStencilRadius.
NormalTensorField covariant_derivative(const NormalTensorField& T, const FramePackage& frames);

// Pointwise maps.
NormalTensorField map_points(const NormalTensorField& T, int rank_out, int margin,
                             const std::function<Eigen::MatrixXd(int, int, const Eigen::MatrixXd&)>& f);
NormalTensorField left_multiply(const GridField<Eigen::MatrixXd>& J, const NormalTensorField& T);
// T(..., J_Sigma v, ...) in the given slot: J_Sigma tau_1 = tau_2, J_Sigma tau_2 = -tau_1.
NormalTensorField rotate_slot(const NormalTensorField& T, int slot);
// sum_i T(..., tau_i, ..., tau_i, ...) over slots a < b.
NormalTensorField contract(const NormalTensorField& T, int a, int b);
NormalTensorField add(const NormalTensorField& x, const NormalTensorField& y, double a = 1.0, double b = 1.0);
NormalTensorField scale(const NormalTensorField& x, double s);

// Largest per-node Frobenius norm over valid nodes (optionally one column only).
double max_norm(const NormalTensorField& T, int column = -1);
double max_norm_within(const NormalTensorField& T, int margin, int column = -1);

}  // namespace minsurf
