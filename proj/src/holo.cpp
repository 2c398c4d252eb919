#include "minsurf/holo.hpp"

#include <algorithm>
#include <cmath>

#include "minsurf/error.hpp"

namespace minsurf {

namespace {

double ambient_derivative_residual(const FramePackage& fr, const GridField<Mat>& Jamb) {
  const ChartDomain& d = fr.domain;
  const int m = Jamb.margin() + kStencilRadius;
  const double h[2] = {d.hu(), d.hv()};
  double worst = 0.0;
  for (int j = m; j < d.nv - m; ++j) {
    for (int i = m; i < d.nu - m; ++i) {
      const Mat dJ[2] = {centered_difference<Mat>(Jamb(i - 2, j), Jamb(i - 1, j), Jamb(i + 1, j), Jamb(i + 2, j), h[0]),
                         centered_difference<Mat>(Jamb(i, j - 2), Jamb(i, j - 1), Jamb(i, j + 1), Jamb(i, j + 2), h[1])};
      Mat frame(fr.ambient_dim, fr.ambient_dim);
      frame << fr.tau(i, j), fr.nu(i, j);
      const Eigen::Matrix2d& E = fr.E(i, j);
      for (int p = 0; p < 2; ++p) {
        const Mat image = (E(p, 0) * dJ[0] + E(p, 1) * dJ[1]) * frame;
        worst = std::max(worst, image.colwise().norm().maxCoeff());
      }
    }
  }
  return worst;
}

}  // namespace

double max_component_norm(const NormalTensorField& T) {
  const ChartDomain& d = T.values.domain();
  double worst = 0.0;
  for (int j = T.margin(); j < d.nv - T.margin(); ++j) {
    for (int i = T.margin(); i < d.nu - T.margin(); ++i) {
      worst = std::max(worst, T(i, j).colwise().norm().maxCoeff());
    }
  }
  return worst;
}

HoloResiduals inf_holo_residuals(const NormalTensorField& A, const FramePackage& fr, const GridField<Mat>& JN) {
  HoloResiduals out;
  const NormalTensorField rotA = rotate_slot(A, 0);
  const NormalTensorField JA = left_multiply(JN, A);
  out.res_b = max_component_norm(add(rotA, JA, 1.0, -1.0));
  out.res_b_minus = max_component_norm(add(rotA, JA, 1.0, 1.0));
  out.res_a = ambient_derivative_residual(fr, pullback_J(fr, JN, 1.0));
  out.res_a_minus = ambient_derivative_residual(fr, pullback_J(fr, JN, -1.0));
  return out;
}

DbarPair dbar_from_derivative(const NormalTensorField& DT, const GridField<Mat>& JN) {
  const NormalTensorField Jrot = left_multiply(JN, rotate_slot(DT, 0));
  return {add(DT, Jrot, 0.5, 0.5), add(DT, Jrot, 0.5, -0.5)};
}

DbarPair dbar_operators(const NormalTensorField& T, const FramePackage& fr, const GridField<Mat>& JN) {
  return dbar_from_derivative(covariant_derivative(T, fr), JN);
}

NormalTensorField d01_adjoint(const NormalTensorField& S, const FramePackage& fr, const GridField<Mat>& JN) {
  return scale(contract(dbar_operators(S, fr, JN).d10, 0, 1), -1.0);
}

NormalTensorField d10_adjoint(const NormalTensorField& S, const FramePackage& fr, const GridField<Mat>& JN) {
  return scale(contract(dbar_operators(S, fr, JN).d01, 0, 1), -1.0);
}

ApmHolomorphicity verify_apm_holomorphicity(const ApmTensors& apm, const NormalTensorField& A,
                                            const FramePackage& fr, const GridField<Mat>& JN,
                                            double minimality_threshold) {
  ApmHolomorphicity out;
  out.minimality_warning = minimality_residual(A) > minimality_threshold;
  const NormalTensorField dplus = dbar_operators(apm.plus, fr, JN).d01;
  const NormalTensorField dminus = dbar_operators(apm.minus, fr, JN).d10;
  out.res_plus = max_norm(dplus, 0);
  out.res_minus = max_norm(dminus, 0);
  out.res_plus_full = max_norm(dplus);
  out.res_minus_full = max_norm(dminus);
  out.intertwine = max_norm(add(rotate_slot(dplus, 0), left_multiply(JN, dplus)));
  return out;
}

WeitzenbockResiduals verify_weitzenbock(const NormalTensorField& T, const FramePackage& fr, const GridField<Mat>& JN) {
  const NormalTensorField DT = covariant_derivative(T, fr);
  const DbarPair parts = dbar_from_derivative(DT, JN);
  const NormalTensorField star01 = d01_adjoint(parts.d01, fr, JN);
  const NormalTensorField star10 = d10_adjoint(parts.d10, fr, JN);
  const NormalTensorField D2 = covariant_derivative(DT, fr);
  const NormalTensorField rough = scale(contract(D2, 0, 1), -1.0);
  WeitzenbockResiduals out;
  out.sum_residual = max_norm(add(add(star01, star10), rough, 1.0, -1.0));
  // sum_i D^2_{e_i, J e_i} - D^2_{J e_i, e_i}
  const NormalTensorField commutator =
      add(contract(rotate_slot(D2, 1), 0, 1), contract(rotate_slot(D2, 0), 0, 1), 1.0, -1.0);
  const NormalTensorField predicted = scale(left_multiply(JN, commutator), 0.5);
  out.diff_residual = max_norm(add(add(star10, star01, 1.0, -1.0), predicted, 1.0, -1.0));
  return out;
}

APlusPdeResidual a_plus_pde_residual(const ApmTensors& apm, const CurvatureFields& curv, const FramePackage& fr,
                                     const GridField<Mat>& JN) {
  const NormalTensorField L = scale(contract(covariant_derivative(covariant_derivative(apm.plus, fr), fr), 0, 1), -1.0);
  const ChartDomain& d = fr.domain;
  const int m = std::max(L.margin(), curv.FD.margin());
  APlusPdeResidual out;
  for (int sign = 0; sign < 2; ++sign) {
    const double s = sign == 0 ? 1.0 : -1.0;
    double worst = 0.0;
    for (int j = m; j < d.nv - m; ++j) {
      for (int i = m; i < d.nu - m; ++i) {
        const double K = curv.K(i, j);
        Eigen::Matrix2d R;  // column b holds R(tau_1, tau_2) tau_b
        R << 0.0, K, -K, 0.0;
        R *= s;
        const Mat& Ap = apm.plus(i, j);
        Mat X = curv.FD(i, j) * Ap;
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            for (int l = 0; l < 2; ++l) {
              X.col(2 * a + b) -= R(l, a) * Ap.col(2 * l + b) + R(l, b) * Ap.col(2 * a + l);
            }
          }
        }
        const Mat res = 0.5 * L(i, j) - 0.5 * JN(i, j) * X;
        worst = std::max(worst, res.colwise().norm().maxCoeff());
      }
    }
    (sign == 0 ? out.standard : out.flipped) = worst;
  }
  out.annihilating = out.flipped < out.standard ? "flipped" : "standard";
  return out;
}

AmbientComplexStructure reconstruct_ambient_J(const FramePackage& fr, const GridField<Mat>& JN, Orientation which) {
  const GridField<Mat> Jamb = pullback_J(fr, JN, which == Orientation::plus ? 1.0 : -1.0);
  const ChartDomain& d = fr.domain;
  const int n = fr.ambient_dim;
  Mat mean = Mat::Zero(n, n);
  int count = 0;
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) {
      if (!Jamb.valid(i, j)) continue;
      mean += Jamb(i, j);
      ++count;
    }
  }
  if (count == 0) throw Error("no nodes carry a normal complex structure");
  mean /= count;
  Eigen::JacobiSVD<Mat> svd(mean, Eigen::ComputeFullU | Eigen::ComputeFullV);
  AmbientComplexStructure out;
  out.Jbar = svd.matrixU() * svd.matrixV().transpose();
  out.projection_distance = (mean - out.Jbar).norm();
  const Mat I = Mat::Identity(n, n);
  out.orthogonality = (out.Jbar.transpose() * out.Jbar - I).norm();
  out.square = (out.Jbar * out.Jbar + I).norm();
  const Eigen::Matrix2d JS = canonical_JSigma();
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) {
      if (!Jamb.valid(i, j)) continue;
      out.constancy_residual = std::max(out.constancy_residual, (Jamb(i, j) - out.Jbar).cwiseAbs().maxCoeff());
      const Mat& T = fr.tau(i, j);
      out.holomorphy_residual = std::max(out.holomorphy_residual, (T * JS - out.Jbar * T).norm());
    }
  }
  return out;
}

}  // namespace minsurf
