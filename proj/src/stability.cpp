#include "minsurf/stability.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "minsurf/error.hpp"

namespace minsurf {

namespace {

int interior_index(const ChartDomain& d, int i, int j) {
  if (i < 1 || j < 1 || i > d.nu - 2 || j > d.nv - 2) return -1;
  return (j - 1) * (d.nu - 2) + (i - 1);
}

// Per-node 3x3 neighbourhood of r x r blocks.
class BlockAccumulator {
 public:
  BlockAccumulator(const ChartDomain& d, int r)
      : d_(d), r_(r), blocks_(static_cast<std::size_t>((d.nu - 2) * (d.nv - 2)) * 9, Mat::Zero(r, r)) {}

  void add(int i1, int j1, int i2, int j2, const Mat& block) {
    const int a = interior_index(d_, i1, j1);
    if (a < 0 || interior_index(d_, i2, j2) < 0) return;
    const int slot = (j2 - j1 + 1) * 3 + (i2 - i1 + 1);
    blocks_[static_cast<std::size_t>(a) * 9 + static_cast<std::size_t>(slot)] += block;
  }

  SparseMat build() const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(blocks_.size() * static_cast<std::size_t>(r_ * r_));
    for (int j = 1; j <= d_.nv - 2; ++j) {
      for (int i = 1; i <= d_.nu - 2; ++i) {
        const int a = interior_index(d_, i, j);
        for (int slot = 0; slot < 9; ++slot) {
          const int b = interior_index(d_, i + slot % 3 - 1, j + slot / 3 - 1);
          if (b < 0) continue;
          const Mat& blk = blocks_[static_cast<std::size_t>(a) * 9 + static_cast<std::size_t>(slot)];
          for (int q = 0; q < r_; ++q) {
            for (int p = 0; p < r_; ++p) {
              if (blk(p, q) != 0.0) trip.emplace_back(a * r_ + p, b * r_ + q, blk(p, q));
            }
          }
        }
      }
    }
    const int n = (d_.nu - 2) * (d_.nv - 2) * r_;
    SparseMat out(n, n);
    out.setFromTriplets(trip.begin(), trip.end());
    SparseMat t = out.transpose();
    SparseMat sym = 0.5 * (out + t);
    sym.makeCompressed();
    return sym;
  }

 private:
  ChartDomain d_;
  int r_;
  std::vector<Mat> blocks_;
};

}  // namespace

Vec DiscretizedJacobiForm::pack(const NormalTensorField& s) const {
  Vec x = Vec::Zero(unknowns());
  for (int j = 1; j <= domain.nv - 2; ++j) {
    for (int i = 1; i <= domain.nu - 2; ++i) {
      x.segment(interior_index(domain, i, j) * normal_rank, normal_rank) = s(i, j).col(0);
    }
  }
  return x;
}

NormalTensorField DiscretizedJacobiForm::unpack(const Vec& x) const {
  NormalTensorField s(0, domain, 0, normal_rank);
  for (int j = 1; j <= domain.nv - 2; ++j) {
    for (int i = 1; i <= domain.nu - 2; ++i) {
      s(i, j).col(0) = x.segment(interior_index(domain, i, j) * normal_rank, normal_rank);
    }
  }
  return s;
}

DiscretizedJacobiForm assemble_form(const FramePackage& fr, const NormalTensorField& A) {
  const ChartDomain& d = fr.domain;
  if (d.nu < 5 || d.nv < 5) throw GridTooCoarse("the second-variation form needs at least 4 interior cells per direction");
  if (!fr.has_connection()) throw Error("assembling the form needs connection coefficients");
  const int r = fr.normal_rank;
  const double hu = d.hu(), hv = d.hv();
  const Mat I = Mat::Identity(r, r);
  BlockAccumulator K(d, r), P(d, r), M(d, r);
  DiscretizedJacobiForm form;
  form.domain = d;
  form.normal_rank = r;

  struct Term {
    int i, j;
    Mat c;
  };
  for (int j = 0; j + 1 < d.nv; ++j) {
    for (int i = 0; i + 1 < d.nu; ++i) {
      for (int cj = j; cj <= j + 1; ++cj) {
        for (int ci = i; ci <= i + 1; ++ci) {
          const Eigen::Matrix2d& E = fr.E(ci, cj);
          const double w = 0.25 * hu * hv * fr.area(ci, cj);
          // Edge differences through the corner: u-edge in row cj, v-edge in column ci.
          const std::array<Term, 4> du_dv = {
              Term{i, cj, -I / hu + 0.5 * fr.theta_chart(i, cj)[0]},
              Term{i + 1, cj, I / hu + 0.5 * fr.theta_chart(i + 1, cj)[0]},
              Term{ci, j, -I / hv + 0.5 * fr.theta_chart(ci, j)[1]},
              Term{ci, j + 1, I / hv + 0.5 * fr.theta_chart(ci, j + 1)[1]},
          };
          for (int p = 0; p < 2; ++p) {
            std::vector<Term> terms;
            for (int t = 0; t < 4; ++t) {
              const double coef = E(p, t < 2 ? 0 : 1);
              if (coef == 0.0) continue;
              const Term& src = du_dv[static_cast<std::size_t>(t)];
              bool merged = false;
              for (Term& x : terms) {
                if (x.i == src.i && x.j == src.j) {
                  x.c += coef * src.c;
                  merged = true;
                }
              }
              if (!merged) terms.push_back(Term{src.i, src.j, coef * src.c});
            }
            for (const Term& a : terms) {
              for (const Term& b : terms) K.add(a.i, a.j, b.i, b.j, w * (a.c.transpose() * b.c));
            }
          }
        }
      }
    }
  }
  for (int j = 1; j <= d.nv - 2; ++j) {
    for (int i = 1; i <= d.nu - 2; ++i) {
      const double w = hu * hv * fr.area(i, j);
      const Mat S = A(i, j) * A(i, j).transpose();
      form.potential_bound = std::max(form.potential_bound, Eigen::SelfAdjointEigenSolver<Mat>(S).eigenvalues().cwiseAbs().maxCoeff());
      P.add(i, j, i, j, w * S);
      M.add(i, j, i, j, w * I);
    }
  }
  form.K = K.build();
  form.P = P.build();
  form.M = M.build();
  return form;
}

SpectrumResult smallest_eigenvalue(const DiscretizedJacobiForm& form, const SpectrumOptions& opt) {
  const int n = form.unknowns();
  if (n == 0) throw GridTooCoarse("no interior unknowns");
  const SparseMat L = form.K - form.P;
  const Vec mdiag = form.M.diagonal();
  SpectrumResult res;
  res.shift = -(1.0 + form.potential_bound);
  const SparseMat shifted = L - res.shift * form.M;
  Eigen::SimplicialLDLT<SparseMat> solver(shifted);
  if (solver.info() != Eigen::Success) throw NoConvergence("factorization of the shifted form failed", 0, 0.0, 0.0);

  const int b = std::max(1, std::min(opt.block_size, n));
  Mat X(n, b);
  X.col(0).setOnes();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int c = 1; c < b; ++c) {
    for (int k = 0; k < n; ++k) X(k, c) = uni(rng);
  }
  auto m_orthonormalize = [&](Mat& Y) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int c = 0; c < Y.cols(); ++c) {
        for (int q = 0; q < c; ++q) {
          Y.col(c) -= (Y.col(q).cwiseProduct(mdiag)).dot(Y.col(c)) * Y.col(q);
        }
        const double len = std::sqrt(Y.col(c).cwiseProduct(mdiag).dot(Y.col(c)));
        Y.col(c) /= len;
      }
    }
  };
  m_orthonormalize(X);

  double best_lambda = 0.0, best_res = std::numeric_limits<double>::infinity();
  Vec best_x;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    Mat Y = solver.solve(form.M * X);
    m_orthonormalize(Y);
    Mat H = Y.transpose() * (L * Y);
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> eig(H);
    X = Y * eig.eigenvectors();
    const double lambda = eig.eigenvalues()(0);
    const Vec x = X.col(0);
    const Vec r = L * x - lambda * (form.M * x);
    const double rn = std::sqrt(r.cwiseProduct(mdiag.cwiseInverse()).dot(r)) / (1.0 + std::abs(lambda));
    if (rn < best_res) {
      best_res = rn;
      best_lambda = lambda;
      best_x = x;
    }
    if (rn <= opt.solver_tol) {
      res.lambda_min = lambda;
      res.iterations = it;
      res.residual_norm = rn;
      res.plain_residual = r.norm() / x.norm();
      res.eigen_section = form.unpack(x);
      return res;
    }
  }
  std::ostringstream os;
  os << "smallest eigenvalue did not converge in " << opt.max_iterations << " iterations";
  throw NoConvergence(os.str(), opt.max_iterations, best_lambda, best_res);
}

SpecialVariation special_variation_inequality(const Vec& a, const ChartFunction& f, const FramePackage& fr,
                                              const NormalTensorField& A, const GridField<Mat>& JN) {
  const ChartDomain& d = fr.domain;
  const GridField<double> fv = sample(f, d);
  const GridField<double> g2 = gradient_norm_sq(f, fr);
  const GridField<double> q = q_direct(a, A, JN, fr);
  NormalTensorField s(0, d, 0, fr.normal_rank);
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) {
      if (fv(i, j) == 0.0) continue;
      if (!JN.valid(i, j)) throw SupportTouchesBoundary("cutoff reaches nodes without a normal complex structure");
      s(i, j) = fv(i, j) * (JN(i, j) * (fr.nu(i, j).transpose() * a));
    }
  }
  SpecialVariation out;
  out.lhs = second_variation_direct(s, fr, A);
  double middle = 0.0, rhs = 0.0;
  for (int j = 1; j < d.nv - 1; ++j) {
    for (int i = 1; i < d.nu - 1; ++i) {
      const double w = d.hu() * d.hv() * fr.area(i, j);
      const double aperp2 = (fr.nu(i, j).transpose() * a).squaredNorm();
      const double f2q = fv(i, j) * fv(i, j) * q(i, j);
      middle += w * (g2(i, j) * aperp2 + f2q);
      rhs += w * (g2(i, j) + f2q);
    }
  }
  out.middle = middle;
  out.rhs = rhs;
  out.slack_lhs_middle = middle - out.lhs;
  out.slack_middle_rhs = rhs - middle;
  return out;
}

double flat_dirichlet_eigenvalue(const ChartDomain& d) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double lu = d.u_max - d.u_min, lv = d.v_max - d.v_min;
  return pi2 * (1.0 / (lu * lu) + 1.0 / (lv * lv));
}

}  // namespace minsurf
