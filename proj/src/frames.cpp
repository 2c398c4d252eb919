#include "minsurf/frames.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "minsurf/error.hpp"
#include "minsurf/parallel.hpp"

namespace minsurf {

namespace {

Mat antisym(const Mat& x) { return 0.5 * (x - x.transpose()); }

// Orthonormal basis of the normal space from the projected standard basis.
Mat normal_candidate(const Mat& T, int n, int r) {
  Mat C(n, r);
  int found = 0;
  for (int m = 0; m < n && found < r; ++m) {
    Vec w = -T * T.row(m).transpose();
    w(m) += 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (int q = 0; q < found; ++q) w -= C.col(q).dot(w) * C.col(q);
    }
    const double len = w.norm();
    if (len >= 1e-3) C.col(found++) = w / len;
  }
  if (found < r) throw GaugeContinuationFailure("normal projection of the reference basis lost rank");
  return C;
}

Mat polar_factor(const Mat& M, double* smallest = nullptr) {
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (smallest) *smallest = svd.singularValues()(svd.singularValues().size() - 1);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace

FramePackage compute_frames(const ImmersionPatch& patch, const ChartDomain& grid, double metric_tol) {
  grid.validate();
  const int n = patch.ambient_dim;
  if (n < 4 || n % 2 != 0) throw BadParams("ambient dimension must be even and at least 4");
  const int r = n - 2;
  FramePackage fr;
  fr.domain = grid;
  fr.ambient_dim = n;
  fr.normal_rank = r;
  fr.jets = GridField<Jet3>(grid, 0);
  fr.tau = GridField<Mat>(grid, 0);
  fr.nu = GridField<Mat>(grid, 0);
  fr.metric = GridField<Eigen::Matrix2d>(grid, 0);
  fr.E = GridField<Eigen::Matrix2d>(grid, 0);
  fr.area = GridField<double>(grid, 0);

  GridField<Mat> candidate(grid, 0);
  parallel_for(0, grid.nv, [&](int j) {
    for (int i = 0; i < grid.nu; ++i) {
      Jet3 jet = evaluate_jet(patch, grid.u(i), grid.v(j), 2);
      Eigen::Matrix2d g;
      g << jet.Fu.dot(jet.Fu), jet.Fu.dot(jet.Fv), jet.Fu.dot(jet.Fv), jet.Fv.dot(jet.Fv);
      const double lmin =
          Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(g, Eigen::EigenvaluesOnly).eigenvalues()(0);
      if (lmin < metric_tol) {
        std::ostringstream os;
        os << patch.name << ": induced metric degenerate at (" << grid.u(i) << ", " << grid.v(j) << ")";
        throw DegenerateImmersion(os.str());
      }
      // Gram-Schmidt on (F_u, F_v).
      const double n1 = jet.Fu.norm();
      Vec t1 = jet.Fu / n1;
      Vec w = jet.Fv - t1.dot(jet.Fv) * t1;
      const double n2 = w.norm();
      Vec t2 = w / n2;
      Eigen::Matrix2d E;
      E << 1.0 / n1, 0.0, -t1.dot(jet.Fv) / (n1 * n2), 1.0 / n2;
      Mat T(n, 2);
      T.col(0) = t1;
      T.col(1) = t2;
      fr.tau(i, j) = T;
      fr.metric(i, j) = g;
      fr.E(i, j) = E;
      fr.area(i, j) = std::sqrt(g.determinant());
      candidate(i, j) = normal_candidate(T, n, r);
      fr.jets(i, j) = std::move(jet);
    }
  });

  // Row-major gauge continuation from the (u_min, v_min) corner.
  double worst = 1.0;
  for (int j = 0; j < grid.nv; ++j) {
    for (int i = 0; i < grid.nu; ++i) {
      const Mat& C = candidate(i, j);
      if (i == 0 && j == 0) {
        Mat N = C;
        Mat frame(n, n);
        frame << fr.tau(0, 0), N;
        if (frame.determinant() < 0) N.col(0) = -N.col(0);
        fr.nu(0, 0) = N;
        continue;
      }
      const Mat& prev = i > 0 ? fr.nu(i - 1, j) : fr.nu(0, j - 1);
      double smallest = 0.0;
      const Mat U = polar_factor(C.transpose() * prev, &smallest);
      worst = std::min(worst, smallest);
      if (smallest < 0.1) {
        std::ostringstream os;
        os << patch.name << ": normal planes of neighbouring nodes nearly orthogonal at (" << grid.u(i)
           << ", " << grid.v(j) << "); refine the grid";
        throw GaugeContinuationFailure(os.str());
      }
      fr.nu(i, j) = C * U;
    }
  }
  fr.gauge_min_overlap = worst;
  return fr;
}

NormalTensorField second_fundamental_form(const FramePackage& fr) {
  const ChartDomain& d = fr.domain;
  NormalTensorField A(2, d, 0, fr.normal_rank);
  parallel_for(0, d.nv, [&](int j) {
    for (int i = 0; i < d.nu; ++i) {
      const Jet3& jet = fr.jets(i, j);
      const Eigen::Matrix2d& E = fr.E(i, j);
      const Mat& N = fr.nu(i, j);
      const Vec H[2][2] = {{jet.Fuu, jet.Fuv}, {jet.Fuv, jet.Fvv}};
      Mat& out = A(i, j);
      for (int a = 0; a < 2; ++a) {
        for (int b = a; b < 2; ++b) {
          Vec acc = Vec::Zero(fr.ambient_dim);
          for (int c = 0; c < 2; ++c) {
            for (int e = 0; e < 2; ++e) acc += E(a, c) * E(b, e) * H[c][e];
          }
          out.col(2 * a + b) = N.transpose() * acc;
        }
      }
      out.col(2) = out.col(1);
    }
  });
  return A;
}

GridField<double> mean_curvature_norm(const NormalTensorField& A) {
  GridField<double> out(A.values.domain(), A.margin(), 0.0);
  for (int j = 0; j < out.nv(); ++j) {
    for (int i = 0; i < out.nu(); ++i) {
      if (A.valid(i, j)) out(i, j) = (A(i, j).col(0) + A(i, j).col(3)).norm();
    }
  }
  return out;
}

double minimality_residual(const NormalTensorField& A) {
  const GridField<double> h = mean_curvature_norm(A);
  double worst = 0.0;
  for (int j = 0; j < h.nv(); ++j) {
    for (int i = 0; i < h.nu(); ++i) {
      if (h.valid(i, j)) worst = std::max(worst, h(i, j));
    }
  }
  return worst;
}

void connection_coefficients(FramePackage& fr) {
  const ChartDomain& d = fr.domain;
  const int r = fr.normal_rank;
  fr.theta_chart = GridField<ChartPair>(d, 1, ChartPair{Mat::Zero(r, r), Mat::Zero(r, r)});
  fr.theta = fr.theta_chart;
  fr.gamma_chart = GridField<Mat2Pair>(d, 1, Mat2Pair{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()});
  fr.gamma = fr.gamma_chart;
  const double h[2] = {d.hu(), d.hv()};
  parallel_for(1, d.nv - 1, [&](int j) {
    for (int i = 1; i < d.nu - 1; ++i) {
      const Mat& N = fr.nu(i, j);
      const Mat& T = fr.tau(i, j);
      const bool inner = i >= kStencilRadius && j >= kStencilRadius && i < d.nu - kStencilRadius &&
                         j < d.nv - kStencilRadius;
      ChartPair th;
      Mat2Pair ga;
      for (int c = 0; c < 2; ++c) {
        const int di = c == 0 ? 1 : 0;
        const int dj = c == 0 ? 0 : 1;
        Mat dN, dT;
        if (inner) {
          dN = centered_difference<Mat>(fr.nu(i - 2 * di, j - 2 * dj), fr.nu(i - di, j - dj), fr.nu(i + di, j + dj),
                                        fr.nu(i + 2 * di, j + 2 * dj), h[c]);
          dT = centered_difference<Mat>(fr.tau(i - 2 * di, j - 2 * dj), fr.tau(i - di, j - dj),
                                        fr.tau(i + di, j + dj), fr.tau(i + 2 * di, j + 2 * dj), h[c]);
        } else {
          dN = (fr.nu(i + di, j + dj) - fr.nu(i - di, j - dj)) / (2 * h[c]);
          dT = (fr.tau(i + di, j + dj) - fr.tau(i - di, j - dj)) / (2 * h[c]);
        }
        th[static_cast<std::size_t>(c)] = antisym(N.transpose() * dN);
        ga[static_cast<std::size_t>(c)] = antisym(T.transpose() * dT);
      }
      const Eigen::Matrix2d& E = fr.E(i, j);
      ChartPair thf;
      Mat2Pair gaf;
      for (int p = 0; p < 2; ++p) {
        thf[static_cast<std::size_t>(p)] = E(p, 0) * th[0] + E(p, 1) * th[1];
        gaf[static_cast<std::size_t>(p)] = E(p, 0) * ga[0] + E(p, 1) * ga[1];
      }
      fr.theta_chart(i, j) = th;
      fr.gamma_chart(i, j) = ga;
      fr.theta(i, j) = thf;
      fr.gamma(i, j) = gaf;
    }
  });
}

namespace {

template <class M, class Get>
GridField<M> chart_curvature_impl(const ChartDomain& d, int margin, const M& zero, Get get) {
  const int m = std::max(margin, kStencilRadius) + kStencilRadius;
  GridField<M> out(d, m, zero);
  const double hu = d.hu();
  const double hv = d.hv();
  parallel_for(m, d.nv - m, [&](int j) {
    for (int i = m; i < d.nu - m; ++i) {
      const M du_v = centered_difference<M>(get(i - 2, j, 1), get(i - 1, j, 1), get(i + 1, j, 1), get(i + 2, j, 1), hu);
      const M dv_u = centered_difference<M>(get(i, j - 2, 0), get(i, j - 1, 0), get(i, j + 1, 0), get(i, j + 2, 0), hv);
      const M& a = get(i, j, 0);
      const M& b = get(i, j, 1);
      out(i, j) = du_v - dv_u + a * b - b * a;
    }
  });
  return out;
}

}  // namespace

GridField<Mat> chart_curvature(const GridField<ChartPair>& theta_chart) {
  const ChartDomain& d = theta_chart.domain();
  const int r = static_cast<int>(theta_chart(theta_chart.margin(), theta_chart.margin())[0].rows());
  return chart_curvature_impl<Mat>(d, theta_chart.margin(), Mat::Zero(r, r), [&](int i, int j, int c) -> const Mat& {
    return theta_chart(i, j)[static_cast<std::size_t>(c)];
  });
}

CurvatureFields curvatures(const FramePackage& fr) {
  if (!fr.has_connection()) throw Error("curvatures need connection coefficients");
  const ChartDomain& d = fr.domain;
  CurvatureFields out;
  out.FD = chart_curvature(fr.theta_chart);
  GridField<Eigen::Matrix2d> R = chart_curvature_impl<Eigen::Matrix2d>(
      d, 1, Eigen::Matrix2d::Zero(),
      [&](int i, int j, int c) -> const Eigen::Matrix2d& { return fr.gamma_chart(i, j)[static_cast<std::size_t>(c)]; });
  const int m = out.FD.margin();
  out.K = GridField<double>(d, m, 0.0);
  for (int j = m; j < d.nv - m; ++j) {
    for (int i = m; i < d.nu - m; ++i) {
      const double det = fr.E(i, j).determinant();
      out.FD(i, j) *= det;
      out.K(i, j) = det * R(i, j)(0, 1);
    }
  }
  return out;
}

Mat ricci_normal_curvature(const Mat& A) {
  const int r = static_cast<int>(A.rows());
  Mat F = Mat::Zero(r, r);
  for (int i = 0; i < 2; ++i) {
    const Vec a1 = A.col(i);      // A(tau_1, tau_i)
    const Vec a2 = A.col(2 + i);  // A(tau_2, tau_i)
    F += a1 * a2.transpose() - a2 * a1.transpose();
  }
  return F;
}

CurvatureFields algebraic_curvatures(const NormalTensorField& A) {
  const ChartDomain& d = A.values.domain();
  const int r = static_cast<int>(A(0, 0).rows());
  CurvatureFields out{GridField<Mat>(d, A.margin(), Mat::Zero(r, r)), GridField<double>(d, A.margin(), 0.0)};
  for (int j = A.margin(); j < d.nv - A.margin(); ++j) {
    for (int i = A.margin(); i < d.nu - A.margin(); ++i) {
      const Mat& a = A(i, j);
      out.FD(i, j) = ricci_normal_curvature(a);
      out.K(i, j) = a.col(0).dot(a.col(3)) - a.col(1).squaredNorm();
    }
  }
  return out;
}

SurfaceGeometry build_geometry(const ImmersionPatch& patch, const ChartDomain& grid, double metric_tol) {
  SurfaceGeometry g;
  g.frames = compute_frames(patch, grid, metric_tol);
  connection_coefficients(g.frames);
  g.A = second_fundamental_form(g.frames);
  g.curvature = curvatures(g.frames);
  return g;
}

Vec tangent_coefficients(const FramePackage& fr, int i, int j, const Vec& a) {
  return fr.tau(i, j).transpose() * a;
}

Vec normal_coefficients(const FramePackage& fr, int i, int j, const Vec& a) {
  return fr.nu(i, j).transpose() * a;
}

}  // namespace minsurf
