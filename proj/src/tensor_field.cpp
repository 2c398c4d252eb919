#include "minsurf/tensor_field.hpp"

#include <algorithm>

#include "minsurf/error.hpp"
#include "minsurf/frames.hpp"
#include "minsurf/parallel.hpp"

namespace minsurf {

using Eigen::MatrixXd;

NormalTensorField::NormalTensorField(int rank_, const ChartDomain& domain, int margin, int normal_rank)
    : rank(rank_), values(domain, margin, MatrixXd::Zero(normal_rank, 1 << rank_)) {}

NormalTensorField covariant_derivative(const NormalTensorField& T, const FramePackage& fr) {
  if (!fr.has_connection()) throw Error("covariant derivative needs connection coefficients");
  const ChartDomain& d = T.values.domain();
  const int R = T.rank;
  const int cols = 1 << R;
  const int r = fr.normal_rank;
  const int margin = std::max(T.margin(), 0) + kStencilRadius;
  NormalTensorField out(R + 1, d, margin, r);
  const double h[2] = {d.hu(), d.hv()};
  parallel_for(margin, d.nv - margin, [&](int j) {
    MatrixXd partial[2];
    for (int i = margin; i < d.nu - margin; ++i) {
      partial[0] = centered_difference<MatrixXd>(T(i - 2, j), T(i - 1, j), T(i + 1, j), T(i + 2, j), h[0]);
      partial[1] = centered_difference<MatrixXd>(T(i, j - 2), T(i, j - 1), T(i, j + 1), T(i, j + 2), h[1]);
      const MatrixXd& t = T(i, j);
      const Eigen::Matrix2d& E = fr.E(i, j);
      MatrixXd& o = out(i, j);
      for (int p = 0; p < 2; ++p) {
        const Mat& theta = fr.theta(i, j)[static_cast<std::size_t>(p)];
        const Eigen::Matrix2d& gamma = fr.gamma(i, j)[static_cast<std::size_t>(p)];
        MatrixXd block = E(p, 0) * partial[0] + E(p, 1) * partial[1] + theta * t;
        for (int m = 0; m < cols; ++m) {
          for (int s = 0; s < R; ++s) {
            const int ms = slot_bit(m, R, s);
            for (int l = 0; l < 2; ++l) {
              const double g = gamma(l, ms);
              if (g != 0.0) block.col(m) -= g * t.col(with_slot(m, R, s, l));
            }
          }
        }
        o.middleCols(p * cols, cols) = block;
      }
    }
  });
  return out;
}

NormalTensorField map_points(const NormalTensorField& T, int rank_out, int margin,
                             const std::function<MatrixXd(int, int, const MatrixXd&)>& f) {
  const ChartDomain& d = T.values.domain();
  const int r = static_cast<int>(T.values.data().front().rows());
  NormalTensorField out(rank_out, d, margin, r);
  parallel_for(margin, d.nv - margin, [&](int j) {
    for (int i = margin; i < d.nu - margin; ++i) out(i, j) = f(i, j, T(i, j));
  });
  return out;
}

NormalTensorField left_multiply(const GridField<MatrixXd>& J, const NormalTensorField& T) {
  const int margin = std::max(J.margin(), T.margin());
  return map_points(T, T.rank, margin, [&](int i, int j, const MatrixXd& t) -> MatrixXd { return J(i, j) * t; });
}

NormalTensorField rotate_slot(const NormalTensorField& T, int slot) {
  const int R = T.rank;
  return map_points(T, R, T.margin(), [&](int, int, const MatrixXd& t) -> MatrixXd {
    MatrixXd o(t.rows(), t.cols());
    for (int m = 0; m < t.cols(); ++m) {
      if (slot_bit(m, R, slot) == 0) {
        o.col(m) = t.col(with_slot(m, R, slot, 1));
      } else {
        o.col(m) = -t.col(with_slot(m, R, slot, 0));
      }
    }
    return o;
  });
}

NormalTensorField contract(const NormalTensorField& T, int a, int b) {
  const int R = T.rank;
  if (!(0 <= a && a < b && b < R)) throw Error("contract: invalid slots");
  const int Rout = R - 2;
  return map_points(T, Rout, T.margin(), [&](int, int, const MatrixXd& t) -> MatrixXd {
    MatrixXd o = MatrixXd::Zero(t.rows(), 1 << Rout);
    for (int m = 0; m < t.cols(); ++m) {
      if (slot_bit(m, R, a) != slot_bit(m, R, b)) continue;
      int k = 0;
      for (int s = 0; s < R; ++s) {
        if (s == a || s == b) continue;
        k = (k << 1) | slot_bit(m, R, s);
      }
      o.col(k) += t.col(m);
    }
    return o;
  });
}

NormalTensorField add(const NormalTensorField& x, const NormalTensorField& y, double a, double b) {
  if (x.rank != y.rank) throw Error("add: rank mismatch");
  const int margin = std::max(x.margin(), y.margin());
  return map_points(x, x.rank, margin, [&](int i, int j, const MatrixXd& t) -> MatrixXd { return a * t + b * y(i, j); });
}

NormalTensorField scale(const NormalTensorField& x, double s) { return add(x, x, s, 0.0); }

double max_norm_within(const NormalTensorField& T, int margin, int column) {
  const ChartDomain& d = T.values.domain();
  const int m = std::max(margin, T.margin());
  double worst = 0.0;
  for (int j = m; j < d.nv - m; ++j) {
    for (int i = m; i < d.nu - m; ++i) {
      const double v = column < 0 ? T(i, j).norm() : T(i, j).col(column).norm();
      worst = std::max(worst, v);
    }
  }
  return worst;
}

double max_norm(const NormalTensorField& T, int column) { return max_norm_within(T, 0, column); }

}  // namespace minsurf
