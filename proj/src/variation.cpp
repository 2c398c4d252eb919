#include "minsurf/variation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "minsurf/error.hpp"
#include "minsurf/parallel.hpp"

namespace minsurf {

namespace {

double bump1(double x) { return std::abs(x) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0; }
double bump1_prime(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  const double t = 1.0 - x * x;
  return bump1(x) * (-2.0 * x / (t * t));
}

void require_compact(const NormalTensorField& s) {
  const ChartDomain& d = s.values.domain();
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) {
      const bool edge = i < 2 || j < 2 || i > d.nu - 3 || j > d.nv - 3;
      if (edge && s(i, j).norm() != 0.0) {
        throw SupportTouchesBoundary("section does not vanish within two cells of the boundary");
      }
    }
  }
}

}  // namespace

ChartFunction bump_function(double u0, double v0, double a, double b) {
  if (!(a > 0) || !(b > 0)) throw BadParams("bump half-widths must be positive");
  ChartFunction f;
  f.value = [=](double u, double v) { return bump1((u - u0) / a) * bump1((v - v0) / b); };
  f.gradient = [=](double u, double v) {
    const double x = (u - u0) / a, y = (v - v0) / b;
    return Eigen::Vector2d(bump1_prime(x) / a * bump1(y), bump1(x) * bump1_prime(y) / b);
  };
  return f;
}

ChartFunction centered_bump(const ChartDomain& d, double fraction) {
  return bump_function(0.5 * (d.u_min + d.u_max), 0.5 * (d.v_min + d.v_max), fraction * 0.5 * (d.u_max - d.u_min),
                       fraction * 0.5 * (d.v_max - d.v_min));
}

ChartFunction centered_bump(const ChartDomain& d) {
  const double cells = 0.5 * std::min(d.nu - 1, d.nv - 1);
  const double fraction = std::min(0.74, 1.0 - (2 * kStencilRadius + 0.1) / cells);
  if (!(fraction > 0.0)) throw GridTooCoarse("grid too coarse for a compactly supported cutoff");
  return centered_bump(d, fraction);
}

GridField<double> sample(const ChartFunction& f, const ChartDomain& d) {
  GridField<double> out(d, 0, 0.0);
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) out(i, j) = f.value(d.u(i), d.v(j));
  }
  return out;
}

GridField<double> gradient_norm_sq(const ChartFunction& f, const FramePackage& fr) {
  const ChartDomain& d = fr.domain;
  GridField<double> out(d, 0, 0.0);
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) {
      const Eigen::Vector2d g = f.gradient(d.u(i), d.v(j));
      out(i, j) = g.dot(fr.metric(i, j).inverse() * g);
    }
  }
  return out;
}

NormalTensorField project_ambient_field(const FramePackage& fr, const std::function<Vec(double, double)>& w) {
  const ChartDomain& d = fr.domain;
  NormalTensorField s(0, d, 0, fr.normal_rank);
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) s(i, j) = fr.nu(i, j).transpose() * w(d.u(i), d.v(j));
  }
  return s;
}

std::function<Vec(double, double)> random_ambient_field(int n, unsigned seed, int modes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(-2.0, 2.0), phase(0.0, 6.283185307179586);
  std::normal_distribution<double> amp(0.0, 1.0 / std::sqrt(static_cast<double>(modes)));
  struct Mode {
    int coord;
    double c, a, b, p;
  };
  std::vector<Mode> all;
  for (int k = 0; k < n; ++k) {
    for (int q = 0; q < modes; ++q) {
      Mode m{k, 0, 0, 0, 0};
      m.c = amp(rng);
      m.a = freq(rng);
      m.b = freq(rng);
      m.p = phase(rng);
      all.push_back(m);
    }
  }
  return [all, n](double u, double v) {
    Vec x = Vec::Zero(n);
    for (const Mode& m : all) x(m.coord) += m.c * std::sin(m.a * u + m.b * v + m.p);
    return x;
  };
}

NormalTensorField random_tensor_field(const FramePackage& fr, int rank, unsigned seed) {
  const ChartDomain& d = fr.domain;
  NormalTensorField T(rank, d, 0, fr.normal_rank);
  for (int m = 0; m < (1 << rank); ++m) {
    const auto w = random_ambient_field(fr.ambient_dim, seed + 7919u * static_cast<unsigned>(m));
    for (int j = 0; j < d.nv; ++j) {
      for (int i = 0; i < d.nu; ++i) T(i, j).col(m) = fr.nu(i, j).transpose() * w(d.u(i), d.v(j));
    }
  }
  return T;
}

NormalTensorField normal_projection_constant(const Vec& a, const FramePackage& fr) {
  if (a.size() != fr.ambient_dim) throw BadParams("ambient vector has the wrong dimension");
  return project_ambient_field(fr, [&](double, double) { return a; });
}

double first_derivative_identity_residual(const Vec& a, const FramePackage& fr, const NormalTensorField& A) {
  const NormalTensorField s = normal_projection_constant(a, fr);
  const NormalTensorField Ds = covariant_derivative(s, fr);
  const ChartDomain& d = fr.domain;
  double worst = 0.0;
  for (int j = Ds.margin(); j < d.nv - Ds.margin(); ++j) {
    for (int i = Ds.margin(); i < d.nu - Ds.margin(); ++i) {
      const Vec aT = fr.tau(i, j).transpose() * a;
      for (int p = 0; p < 2; ++p) {
        const Vec res = Ds(i, j).col(p) + aT(0) * A(i, j).col(2 * p) + aT(1) * A(i, j).col(2 * p + 1);
        worst = std::max(worst, res.norm());
      }
    }
  }
  return worst;
}

NormalTensorField rough_laplacian(const NormalTensorField& T, const FramePackage& fr) {
  const NormalTensorField D2 = covariant_derivative(covariant_derivative(T, fr), fr);
  return scale(contract(D2, 0, 1), -1.0);
}

NormalTensorField jacobi_operator(const NormalTensorField& s, const FramePackage& fr, const NormalTensorField& A) {
  if (s.rank != 0) throw Error("the Jacobi operator acts on sections");
  const NormalTensorField L = rough_laplacian(s, fr);
  return map_points(L, 0, L.margin(), [&](int i, int j, const Mat& l) -> Mat {
    const Mat& a = A(i, j);
    return l - a * (a.transpose() * s(i, j));
  });
}

GridField<double> q_direct(const Vec& a, const NormalTensorField& A, const GridField<Mat>& JN, const FramePackage& fr) {
  const ChartDomain& d = fr.domain;
  GridField<double> out(d, JN.margin(), 0.0);
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) {
      if (!JN.valid(i, j)) continue;
      const Vec xi = fr.nu(i, j).transpose() * a;
      const Vec Jxi = JN(i, j) * xi;
      out(i, j) = (A(i, j).transpose() * xi).squaredNorm() - (A(i, j).transpose() * Jxi).squaredNorm();
    }
  }
  return out;
}

GridField<double> q_trace(const NormalTensorField& A, const GridField<Mat>& JN, const FramePackage& fr,
                          const Mat& basis) {
  const Mat B = basis.size() ? basis : Mat::Identity(fr.ambient_dim, fr.ambient_dim);
  GridField<double> sum(fr.domain, JN.margin(), 0.0);
  for (int c = 0; c < B.cols(); ++c) {
    const GridField<double> q = q_direct(B.col(c), A, JN, fr);
    for (std::size_t k = 0; k < sum.data().size(); ++k) sum.data()[k] += q.data()[k];
  }
  return sum;
}

Mat q_matrix(const Mat& A, const Mat& J, const Mat& N) {
  const Mat S = A * A.transpose();
  return N * (S - J.transpose() * S * J) * N.transpose();
}

ApmTensors apm_decompose(const NormalTensorField& A, const GridField<Mat>& JN) {
  const NormalTensorField JrotA = left_multiply(JN, rotate_slot(A, 0));
  return {add(A, JrotA, 0.5, -0.5), add(A, JrotA, 0.5, 0.5)};
}

QViaApm q_via_apm(const Vec& a, const ApmTensors& apm, const GridField<Mat>& JN, const FramePackage& fr) {
  const ChartDomain& d = fr.domain;
  const int m = std::max(JN.margin(), apm.plus.margin());
  QViaApm out{GridField<double>(d, m, 0.0), GridField<double>(d, m, 0.0), GridField<double>(d, m, 0.0)};
  for (int j = m; j < d.nv - m; ++j) {
    for (int i = m; i < d.nu - m; ++i) {
      const Vec xi = fr.nu(i, j).transpose() * a;
      const Vec Jxi = JN(i, j) * xi;
      const Mat& P = apm.plus(i, j);
      const Mat& M = apm.minus(i, j);
      out.general(i, j) = 4.0 * (P.transpose() * xi).dot(M.transpose() * xi);
      auto single = [&](int col) {
        return 8.0 * P.col(col).dot(xi) * M.col(col).dot(xi) - 8.0 * P.col(col).dot(Jxi) * M.col(col).dot(Jxi);
      };
      out.surface(i, j) = single(0);
      out.surface_tau2(i, j) = single(3);
    }
  }
  return out;
}

DichotomyField polarized_dichotomy_check(const ApmTensors& apm, const NormalTensorField& A, const GridField<Mat>& JN,
                                         const FramePackage& fr) {
  const ChartDomain& d = fr.domain;
  const int m = std::max(JN.margin(), apm.plus.margin());
  DichotomyField out{GridField<double>(d, m, 0.0), GridField<double>(d, m, 0.0), GridField<double>(d, m, 0.0),
                     GridField<double>(d, m, 0.0)};
  for (int j = m; j < d.nv - m; ++j) {
    for (int i = m; i < d.nu - m; ++i) {
      const Vec xp = apm.plus(i, j).col(0);
      const Vec xm = apm.minus(i, j).col(0);
      const double np = xp.norm(), nm = xm.norm();
      out.m(i, j) = std::min(np, nm);
      const double ip = xp.dot(xm), ij = xp.dot(JN(i, j) * xm);
      out.c(i, j) = np * np * nm * nm + ip * ip + ij * ij;
      const Mat Q = q_matrix(A(i, j), JN(i, j), fr.nu(i, j));
      const Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (Q + Q.transpose()), Eigen::EigenvaluesOnly).eigenvalues();
      out.q_norm(i, j) = ev.cwiseAbs().maxCoeff();
      out.c_bound(i, j) = 0.25 * np * nm * out.q_norm(i, j);
    }
  }
  return out;
}

std::pair<double, double> second_variation_parts(const NormalTensorField& s, const FramePackage& fr,
                                                 const NormalTensorField& A) {
  if (s.rank != 0) throw Error("second variation acts on sections");
  require_compact(s);
  const ChartDomain& d = fr.domain;
  const double hu = d.hu(), hv = d.hv();
  std::vector<double> row_energy(static_cast<std::size_t>(d.nv - 1), 0.0);
  parallel_for(0, d.nv - 1, [&](int j) {
    double acc = 0.0;
    for (int i = 0; i + 1 < d.nu; ++i) {
      for (int cj = j; cj <= j + 1; ++cj) {
        for (int ci = i; ci <= i + 1; ++ci) {
          const Vec sl = s(i, cj).col(0);
          const Vec sr = s(i + 1, cj).col(0);
          const Vec sb = s(ci, j).col(0);
          const Vec st = s(ci, j + 1).col(0);
          const Vec Du = (sr - sl) / hu + 0.5 * (fr.theta_chart(i, cj)[0] * sl + fr.theta_chart(i + 1, cj)[0] * sr);
          const Vec Dv = (st - sb) / hv + 0.5 * (fr.theta_chart(ci, j)[1] * sb + fr.theta_chart(ci, j + 1)[1] * st);
          const Eigen::Matrix2d& E = fr.E(ci, cj);
          double e = 0.0;
          for (int p = 0; p < 2; ++p) e += (E(p, 0) * Du + E(p, 1) * Dv).squaredNorm();
          acc += 0.25 * hu * hv * fr.area(ci, cj) * e;
        }
      }
    }
    row_energy[static_cast<std::size_t>(j)] = acc;
  });
  double energy = 0.0;
  for (double e : row_energy) energy += e;
  double potential = 0.0;
  for (int j = 1; j < d.nv - 1; ++j) {
    for (int i = 1; i < d.nu - 1; ++i) {
      potential += hu * hv * fr.area(i, j) * (A(i, j).transpose() * s(i, j)).squaredNorm();
    }
  }
  return {energy, potential};
}

double second_variation_direct(const NormalTensorField& s, const FramePackage& fr, const NormalTensorField& A) {
  const auto [energy, potential] = second_variation_parts(s, fr, A);
  return energy - potential;
}

NormalTensorField multiply(const GridField<double>& f, const NormalTensorField& s) {
  return map_points(s, s.rank, s.margin(), [&](int i, int j, const Mat& x) -> Mat { return f(i, j) * x; });
}

CutoffIdentity second_variation_cutoff_identity(const ChartFunction& f, const NormalTensorField& s,
                                                const FramePackage& fr, const NormalTensorField& A) {
  const ChartDomain& d = fr.domain;
  const GridField<double> fv = sample(f, d);
  const GridField<double> g2 = gradient_norm_sq(f, fr);
  CutoffIdentity out;
  out.lhs = second_variation_direct(multiply(fv, s), fr, A);
  const NormalTensorField Js = jacobi_operator(s, fr, A);
  double rhs = 0.0;
  for (int j = 1; j < d.nv - 1; ++j) {
    for (int i = 1; i < d.nu - 1; ++i) {
      const double w = d.hu() * d.hv() * fr.area(i, j);
      double term = g2(i, j) * s(i, j).squaredNorm();
      if (fv(i, j) != 0.0) {
        if (!Js.valid(i, j)) throw SupportTouchesBoundary("cutoff function does not vanish where the Jacobi operator is defined");
        term += fv(i, j) * fv(i, j) * Js(i, j).col(0).dot(s(i, j).col(0));
      }
      rhs += w * term;
    }
  }
  out.rhs = rhs;
  out.discrepancy = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace minsurf
