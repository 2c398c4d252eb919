#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "minsurf/grid.hpp"

namespace minsurf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using ParamMap = std::map<std::string, std::string>;

enum class JetMode { analytic, finite_difference };

struct JetSpec {
  JetMode mode = JetMode::analytic;
  double step = 0.0;  // finite-difference step; 0 selects extent * 1e-3
};

// Partial derivatives of F at one chart point.  Third partials are stored by
// the number of v-derivatives: third[0] = F_uuu, third[1] = F_uuv, third[2] = F_uvv,
// third[3] = F_vvv.
struct Jet3 {
  int order = 0;
  bool low_accuracy_third = false;  // finite-difference third partials
  Vec F, Fu, Fv, Fuu, Fuv, Fvv;
  std::array<Vec, 4> third;

  // Partial with `a` u-derivatives and `b` v-derivatives, a + b <= order.
  const Vec& partial(int a, int b) const;
};

// How the catalog suggests choosing the normal complex structure J_N.
enum class NormalStructureHint {
  frame_constant,       // nu_1 -> nu_2, nu_3 -> nu_4, ... in the continued frame
  ambient_restriction,  // polar factor of the standard ambient complex structure restricted to N
};

// Expected behaviour of a catalog entry; the analysis pipeline turns these into checks.
struct SurfaceTraits {
  bool minimal = true;
  bool holomorphic = false;  // holomorphic for the standard ambient structure
  bool flat_normal = false;
  std::optional<std::pair<double, double>> waist;  // distinguished chart point
};

struct ImmersionPatch {
  std::string name;
  int ambient_dim = 4;
  ChartDomain domain;
  JetSpec jet;
  // Catalog maps are defined on the domain grown by this amount; finite-difference
  // stencils may sample there.
  double eval_margin = 0.0;
  std::function<Vec(double, double)> eval;
  // Closed-form partial derivative d^a/du^a d^b/dv^b F, a + b <= 3.
  std::function<Vec(int, int, double, double)> partial;
  NormalStructureHint normal_hint = NormalStructureHint::frame_constant;
  SurfaceTraits traits;
  ParamMap params;

  int codim_half() const { return (ambient_dim - 2) / 2; }
  double fd_step() const { return jet.step > 0 ? jet.step : domain.extent() * 1e-3; }
};

// Minimum singular value allowed for [F_u F_v].
inline constexpr double kRankTol = 1e-6;

Jet3 evaluate_jet(const ImmersionPatch& patch, double u, double v, int order);

// Smallest singular value of the 2-column Jacobian in a jet.
double jacobian_min_singular_value(const Jet3& jet);

std::vector<std::string> catalog_names();
ImmersionPatch builtin_surface(std::string_view name, const ParamMap& params = {});

// Complex polynomial sum c_n z^n, parsed from forms like "z^2", "0.5*z^3 - 2i*z + 1".
class ComplexPolynomial {
 public:
  ComplexPolynomial() = default;
  explicit ComplexPolynomial(std::vector<std::complex<double>> coefficients);
  static ComplexPolynomial parse(std::string_view text);

  // d-th derivative evaluated at z.
  std::complex<double> derivative(int d, std::complex<double> z) const;
  std::complex<double> operator()(std::complex<double> z) const { return derivative(0, z); }
  const std::vector<std::complex<double>>& coefficients() const { return coeffs_; }
  std::string to_string() const;

 private:
  std::vector<std::complex<double>> coeffs_;
};

}  // namespace minsurf
