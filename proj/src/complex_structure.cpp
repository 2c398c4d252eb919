#include "minsurf/complex_structure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "minsurf/error.hpp"
#include "minsurf/parallel.hpp"

namespace minsurf {

namespace {

Mat antisym(const Mat& x) { return 0.5 * (x - x.transpose()); }

Vec vec_of(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }
Mat mat_of(const Vec& v, int r) { return Eigen::Map<const Mat>(v.data(), r, r); }

}  // namespace

Eigen::Matrix2d canonical_JSigma() {
  Eigen::Matrix2d J;
  J << 0.0, -1.0, 1.0, 0.0;
  return J;
}

Mat JSigma_ambient(const FramePackage& fr, int i, int j) {
  const Mat& T = fr.tau(i, j);
  return T * canonical_JSigma() * T.transpose();
}

Mat standard_block_J(int r) {
  Mat J = Mat::Zero(r, r);
  for (int a = 0; a + 1 < r; a += 2) {
    J(a + 1, a) = 1.0;
    J(a, a + 1) = -1.0;
  }
  return J;
}

Mat standard_ambient_J(int n) { return standard_block_J(n); }

Mat nearest_complex_structure(const Mat& X) {
  const Mat A = antisym(X);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

AxiomReport check_JN_axioms(const GridField<Mat>& J, const FramePackage& fr) {
  AxiomReport rep;
  const ChartDomain& d = J.domain();
  const int r = fr.normal_rank;
  const Mat I = Mat::Identity(r, r);
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) {
      if (!J.valid(i, j)) continue;
      const Mat& x = J(i, j);
      rep.orthogonality = std::max(rep.orthogonality, (x.transpose() * x - I).norm());
      rep.square = std::max(rep.square, (x * x + I).norm());
    }
  }
  const int m = std::max(J.margin(), kStencilRadius) + kStencilRadius;
  const double h[2] = {d.hu(), d.hv()};
  for (int j = m; j < d.nv - m; ++j) {
    for (int i = m; i < d.nu - m; ++i) {
      const Mat dJ[2] = {centered_difference<Mat>(J(i - 2, j), J(i - 1, j), J(i + 1, j), J(i + 2, j), h[0]),
                         centered_difference<Mat>(J(i, j - 2), J(i, j - 1), J(i, j + 1), J(i, j + 2), h[1])};
      const Eigen::Matrix2d& E = fr.E(i, j);
      for (int p = 0; p < 2; ++p) {
        const Mat& th = fr.theta(i, j)[static_cast<std::size_t>(p)];
        const Mat res = E(p, 0) * dJ[0] + E(p, 1) * dJ[1] + th * J(i, j) - J(i, j) * th;
        rep.parallelism = std::max(rep.parallelism, res.norm());
      }
    }
  }
  return rep;
}

NormalComplexStructure constant_JN(const FramePackage& fr, const Mat& J) {
  NormalComplexStructure out;
  out.J = GridField<Mat>(fr.domain, 0, J);
  out.source = "constant";
  return out;
}

NormalComplexStructure ambient_restriction_JN(const FramePackage& fr, const Mat& Jbar) {
  NormalComplexStructure out;
  out.J = GridField<Mat>(fr.domain, 0);
  out.source = "ambient restriction";
  parallel_for(0, fr.domain.nv, [&](int j) {
    for (int i = 0; i < fr.domain.nu; ++i) {
      const Mat& N = fr.nu(i, j);
      out.J(i, j) = nearest_complex_structure(N.transpose() * Jbar * N);
    }
  });
  return out;
}

NormalComplexStructure random_pointwise_JN(const FramePackage& fr, unsigned seed) {
  const int r = fr.normal_rank;
  NormalComplexStructure out;
  out.J = GridField<Mat>(fr.domain, 0);
  out.source = "random pointwise";
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const Mat J0 = standard_block_J(r);
  for (int j = 0; j < fr.domain.nv; ++j) {
    for (int i = 0; i < fr.domain.nu; ++i) {
      Mat G(r, r);
      for (int c = 0; c < r * r; ++c) G.data()[c] = gauss(rng);
      const Mat Q = Eigen::HouseholderQR<Mat>(G).householderQ();
      out.J(i, j) = Q * J0 * Q.transpose();
    }
  }
  return out;
}

GridField<Mat> pullback_J(const FramePackage& fr, const GridField<Mat>& JN, double sign) {
  GridField<Mat> out(fr.domain, JN.margin(), Mat::Zero(fr.ambient_dim, fr.ambient_dim));
  const Eigen::Matrix2d JS = canonical_JSigma();
  parallel_for(0, fr.domain.nv, [&](int j) {
    for (int i = 0; i < fr.domain.nu; ++i) {
      if (!JN.valid(i, j)) continue;
      const Mat& T = fr.tau(i, j);
      const Mat& N = fr.nu(i, j);
      out(i, j) = T * JS * T.transpose() + sign * (N * JN(i, j) * N.transpose());
    }
  });
  return out;
}

// ---------------------------------------------------------------------------

ThetaTransport::ThetaTransport(GridField<ChartPair> theta_chart, int substeps)
    : theta_(std::move(theta_chart)), substeps_(std::max(1, substeps)) {
  const int m = theta_.margin();
  rank_ = static_cast<int>(theta_(m, m)[0].rows());
  curvature_ = chart_curvature(theta_);
}

Mat ThetaTransport::theta_at(int c, int line, double x) const {
  const ChartDomain& d = theta_.domain();
  const int m = theta_.margin();
  const int n = c == 0 ? d.nu : d.nv;
  const int lo = m;
  const int hi = n - 1 - m;
  auto node = [&](int k) -> const Mat& {
    return c == 0 ? theta_(k, line)[0] : theta_(line, k)[1];
  };
  if (hi - lo < 3) {
    const int k = std::clamp(static_cast<int>(std::floor(x)), lo, hi - 1);
    const double t = x - k;
    return (1 - t) * node(k) + t * node(k + 1);
  }
  const int start = std::clamp(static_cast<int>(std::floor(x)) - 1, lo, hi - 3);
  Mat out = Mat::Zero(rank_, rank_);
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) w *= (x - (start + b)) / static_cast<double>(a - b);
    }
    out += w * node(start + a);
  }
  return out;
}

Mat ThetaTransport::segment(int i0, int j0, int i1, int j1) const {
  const ChartDomain& d = theta_.domain();
  if (!theta_.valid(i0, j0) || !theta_.valid(i1, j1)) throw LoopLeavesDomain("transport segment leaves the interior grid");
  int c, line;
  double x0, x1;
  if (j0 == j1 && std::abs(i1 - i0) == 1) {
    c = 0;
    line = j0;
    x0 = i0;
    x1 = i1;
  } else if (i0 == i1 && std::abs(j1 - j0) == 1) {
    c = 1;
    line = i0;
    x0 = j0;
    x1 = j1;
  } else {
    throw Error("transport segments join adjacent grid nodes");
  }
  const double speed = (x1 - x0) * (c == 0 ? d.hu() : d.hv());
  const double dt = 1.0 / substeps_;
  Mat P = Mat::Identity(rank_, rank_);
  auto rhs = [&](double t, const Mat& X) -> Mat { return -speed * theta_at(c, line, x0 + t * (x1 - x0)) * X; };
  for (int s = 0; s < substeps_; ++s) {
    const double t = s * dt;
    const Mat k1 = rhs(t, P);
    const Mat k2 = rhs(t + dt / 2, P + dt / 2 * k1);
    const Mat k3 = rhs(t + dt / 2, P + dt / 2 * k2);
    const Mat k4 = rhs(t + dt, P + dt * k3);
    P += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return P;
}

std::optional<Mat> ThetaTransport::curvature(int i, int j) const {
  if (!curvature_.valid(i, j)) return std::nullopt;
  return curvature_(i, j);
}

AmbientTransport::AmbientTransport(const ImmersionPatch& patch, const FramePackage& frames,
                                   const NormalTensorField& A, int substeps)
    : patch_(&patch), frames_(&frames), A_(&A), substeps_(std::max(1, substeps)) {}

Mat AmbientTransport::segment(int i0, int j0, int i1, int j1) const {
  const ChartDomain& d = frames_->domain;
  if (i0 < 0 || j0 < 0 || i1 < 0 || j1 < 0 || i0 >= d.nu || i1 >= d.nu || j0 >= d.nv || j1 >= d.nv) {
    throw LoopLeavesDomain("transport segment leaves the grid");
  }
  int c;
  if (j0 == j1 && std::abs(i1 - i0) == 1) c = 0;
  else if (i0 == i1 && std::abs(j1 - j0) == 1) c = 1;
  else throw Error("transport segments join adjacent grid nodes");
  const double u0 = d.u(i0), v0 = d.v(j0);
  const double du = d.u(i1) - u0, dv = d.v(j1) - v0;
  const double speed = c == 0 ? du : dv;
  // dPi/dt along the segment from the jet at (u, v).
  auto dpi = [&](double t) -> Mat {
    const Jet3 jet = evaluate_jet(*patch_, u0 + t * du, v0 + t * dv, 2);
    Mat G(jet.Fu.size(), 2);
    G << jet.Fu, jet.Fv;
    Mat dG(jet.Fu.size(), 2);
    if (c == 0) dG << jet.Fuu, jet.Fuv;
    else dG << jet.Fuv, jet.Fvv;
    const Eigen::Matrix2d g = G.transpose() * G;
    const Eigen::Matrix2d gi = g.inverse();
    const Eigen::Matrix2d dg = dG.transpose() * G + G.transpose() * dG;
    const Mat dTT = dG * gi * G.transpose() + G * gi * dG.transpose() - G * (gi * dg * gi) * G.transpose();
    return -speed * dTT;
  };
  Mat X = frames_->nu(i0, j0);
  const double dt = 1.0 / substeps_;
  for (int s = 0; s < substeps_; ++s) {
    const double t = s * dt;
    const Mat p0 = dpi(t), ph = dpi(t + dt / 2), p1 = dpi(t + dt);
    const Mat k1 = p0 * X;
    const Mat k2 = ph * (X + dt / 2 * k1);
    const Mat k3 = ph * (X + dt / 2 * k2);
    const Mat k4 = p1 * (X + dt * k3);
    X += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return frames_->nu(i1, j1).transpose() * X;
}

std::optional<Mat> AmbientTransport::curvature(int i, int j) const {
  return ricci_normal_curvature((*A_)(i, j));
}

// ---------------------------------------------------------------------------

GridLoop rectangle_loop(int i0, int j0, int i1, int j1) {
  return {{i0, j0}, {i1, j0}, {i1, j1}, {i0, j1}, {i0, j0}};
}

Mat parallel_transport_normal(const NormalTransport& tr, const GridLoop& loop) {
  Mat P = Mat::Identity(tr.rank(), tr.rank());
  const ChartDomain& d = tr.domain();
  const int m = tr.margin();
  auto inside = [&](int i, int j) { return i >= m && j >= m && i < d.nu - m && j < d.nv - m; };
  for (std::size_t k = 0; k + 1 < loop.size(); ++k) {
    auto [i, j] = loop[k];
    const auto [ie, je] = loop[k + 1];
    if (!inside(i, j) || !inside(ie, je)) throw LoopLeavesDomain("loop vertex outside the interior grid");
    if (i != ie && j != je) throw Error("loop edges must follow grid lines");
    while (i != ie || j != je) {
      const int ni = i + (ie > i) - (ie < i);
      const int nj = j + (je > j) - (je < j);
      P = tr.segment(i, j, ni, nj) * P;
      i = ni;
      j = nj;
    }
  }
  return P;
}

namespace {

std::vector<int> sample_indices(int lo, int hi, int count) {
  std::vector<int> out;
  if (hi < lo) return out;
  count = std::max(1, std::min(count, hi - lo + 1));
  for (int s = 1; s <= count; ++s) {
    const int k = lo + static_cast<int>(std::lround(static_cast<double>(s) * (hi - lo) / count));
    if (out.empty() || out.back() != k) out.push_back(k);
  }
  return out;
}

}  // namespace

HolonomyResult find_parallel_JN(const NormalTransport& tr, const HolonomyOptions& opt) {
  const ChartDomain& d = tr.domain();
  const int r = tr.rank();
  const int m = tr.margin();
  const int ilo = m, ihi = d.nu - 1 - m, jlo = m, jhi = d.nv - 1 - m;
  if (ihi - ilo < 2 || jhi - jlo < 2) throw GridTooCoarse("holonomy search needs at least 2 interior cells");
  HolonomyResult res;
  res.base_i = ilo;
  res.base_j = jlo;

  // Edge transports: U(i, j) joins (i, j) -> (i+1, j), V(i, j) joins (i, j) -> (i, j+1).
  GridField<Mat> U(d, 0), V(d, 0);
  parallel_for(jlo, jhi + 1, [&](int j) {
    for (int i = ilo; i <= ihi; ++i) {
      if (i < ihi) U(i, j) = tr.segment(i, j, i + 1, j);
      if (j < jhi) V(i, j) = tr.segment(i, j, i, j + 1);
    }
  });
  // L-shaped paths from the base: along u then v (path_uv) and along v then u (path_vu).
  GridField<Mat> path_uv(d, 0), path_vu(d, 0);
  const Mat I = Mat::Identity(r, r);
  path_uv(ilo, jlo) = I;
  path_vu(ilo, jlo) = I;
  for (int i = ilo + 1; i <= ihi; ++i) path_uv(i, jlo) = U(i - 1, jlo) * path_uv(i - 1, jlo);
  for (int j = jlo + 1; j <= jhi; ++j) path_vu(ilo, j) = V(ilo, j - 1) * path_vu(ilo, j - 1);
  for (int i = ilo; i <= ihi; ++i) {
    for (int j = jlo + 1; j <= jhi; ++j) path_uv(i, j) = V(i, j - 1) * path_uv(i, j - 1);
  }
  for (int j = jlo; j <= jhi; ++j) {
    for (int i = ilo + 1; i <= ihi; ++i) path_vu(i, j) = U(i - 1, j) * path_vu(i - 1, j);
  }

  std::vector<Mat> generators;
  for (int j1 : sample_indices(jlo + 1, jhi, opt.loop_samples)) {
    for (int i1 : sample_indices(ilo + 1, ihi, opt.loop_samples)) {
      LoopRecord rec;
      rec.i1 = i1;
      rec.j1 = j1;
      rec.holonomy = path_vu(i1, j1).inverse() * path_uv(i1, j1);
      rec.orthogonality = (rec.holonomy.transpose() * rec.holonomy - I).norm();
      generators.push_back(rec.holonomy);
      res.loops.push_back(std::move(rec));
    }
  }
  for (int j : sample_indices(jlo, jhi, opt.curvature_samples)) {
    for (int i : sample_indices(ilo, ihi, opt.curvature_samples)) {
      const std::optional<Mat> F = tr.curvature(i, j);
      if (!F) continue;
      const Mat& P = path_uv(i, j);
      generators.push_back(P.inverse() * (*F) * P);
      ++res.curvature_count;
    }
  }

  // Stacked commutator operator X -> M X - X M on column-major vec(X).
  const int rr = r * r;
  Mat C(static_cast<Eigen::Index>(generators.size()) * rr, rr);
  for (std::size_t g = 0; g < generators.size(); ++g) {
    const Mat& M = generators[g];
    Mat block = Mat::Zero(rr, rr);
    for (int q = 0; q < rr; ++q) {
      Mat E = Mat::Zero(r, r);
      E.data()[q] = 1.0;
      block.col(q) = vec_of(M * E - E * M);
    }
    C.middleRows(static_cast<Eigen::Index>(g) * rr, rr) = block;
  }
  Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullV);
  res.singular_values = svd.singularValues();
  const double smax = res.singular_values.size() ? res.singular_values(0) : 0.0;
  // Holonomy generators are orthogonal, so the operator has unit scale even when the
  // connection is flat and every singular value is round-off.
  const double scale = std::max(smax, 1.0);
  const double thr = std::max(opt.null_tol * scale, 1e-10);
  Mat null_basis(rr, 0);
  for (int q = 0; q < rr; ++q) {
    if (res.singular_values(q) <= thr) {
      null_basis.conservativeResize(rr, null_basis.cols() + 1);
      null_basis.col(null_basis.cols() - 1) = svd.matrixV().col(q);
    }
  }
  res.commutant_dim = static_cast<int>(null_basis.cols());

  // Certificate: how far the operator is from annihilating any antisymmetric matrix.
  {
    Mat B(rr, r * (r - 1) / 2);
    int col = 0;
    for (int b = 0; b < r; ++b) {
      for (int a = b + 1; a < r; ++a) {
        Mat E = Mat::Zero(r, r);
        E(a, b) = 1.0 / std::sqrt(2.0);
        E(b, a) = -1.0 / std::sqrt(2.0);
        B.col(col++) = vec_of(E);
      }
    }
    const Vec s = Eigen::JacobiSVD<Mat>(C * B).singularValues();
    res.antisymmetric_sigma_min = s(s.size() - 1) / scale;
  }

  std::vector<Mat> seeds{standard_block_J(r)};
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> gauss;
  for (int s = 0; s < opt.random_seeds; ++s) {
    Mat G(r, r);
    for (int c = 0; c < rr; ++c) G.data()[c] = gauss(rng);
    seeds.push_back(antisym(G));
  }
  for (const Mat& seed : seeds) {
    if (null_basis.cols() == 0) break;
    const Vec x = null_basis * (null_basis.transpose() * vec_of(seed));
    const Mat X = antisym(mat_of(x, r));
    if (X.norm() < 1e-8) continue;
    const Mat J = nearest_complex_structure(X);
    if ((J.transpose() * J - I).norm() > 1e-8 || (J * J + I).norm() > 1e-8) continue;
    const double comm = (C * vec_of(J)).norm() / (scale * J.norm());
    if (comm > 10 * opt.null_tol) continue;
    res.found = true;
    res.commutation_residual = comm;
    res.J_base = J;
    break;
  }
  if (!res.found) return res;

  // Canonical representative: first significant entry below the diagonal is positive.
  for (int b = 0; b < r; ++b) {
    bool done = false;
    for (int a = b + 1; a < r; ++a) {
      if (std::abs(res.J_base(a, b)) > 1e-8) {
        if (res.J_base(a, b) < 0) res.J_base = -res.J_base;
        done = true;
        break;
      }
    }
    if (done) break;
  }

  res.JN.source = "holonomy search";
  res.JN.J = GridField<Mat>(d, m, Mat::Zero(r, r));
  for (int j = jlo; j <= jhi; ++j) {
    for (int i = ilo; i <= ihi; ++i) {
      const Mat& P = path_uv(i, j);
      res.JN.J(i, j) = nearest_complex_structure(P * res.J_base * P.inverse());
    }
  }
  return res;
}

SyntheticConnection synthetic_connection(const std::string& name, const ChartDomain& domain) {
  if (name != "so4") throw BadParams("unknown synthetic connection '" + name + "' (expected so4)");
  domain.validate();
  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss;
  auto random_antisym = [&] {
    Mat G(4, 4);
    for (int c = 0; c < 16; ++c) G.data()[c] = gauss(rng);
    return antisym(G);
  };
  const Mat B1 = random_antisym(), B2 = random_antisym(), B3 = random_antisym();
  SyntheticConnection out;
  out.theta_chart = GridField<ChartPair>(domain, 0);
  for (int j = 0; j < domain.nv; ++j) {
    for (int i = 0; i < domain.nu; ++i) {
      const double u = domain.u(i), v = domain.v(j);
      out.theta_chart(i, j) = ChartPair{v * B3, u * B1 + u * u * B2};
    }
  }
  return out;
}

}  // namespace minsurf
