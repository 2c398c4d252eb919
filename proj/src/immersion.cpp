#include "minsurf/immersion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>

#include "minsurf/error.hpp"

namespace minsurf {

namespace {

using cd = std::complex<double>;

const Vec& require(const Vec& v, const char* what) {
  if (v.size() == 0) throw Error(std::string("jet component not evaluated: ") + what);
  return v;
}

void check_inside(const ImmersionPatch& patch, double u, double v, double reach) {
  const ChartDomain& d = patch.domain;
  const double slack = 1e-12 * d.extent();
  const double grow = patch.eval_margin - reach;
  if (u < d.u_min - grow - slack || u > d.u_max + grow + slack || v < d.v_min - grow - slack ||
      v > d.v_max + grow + slack) {
    std::ostringstream os;
    os << "point (" << u << ", " << v << ") outside the chart domain of " << patch.name;
    throw PointOutsideDomain(os.str());
  }
}

double parse_double(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(x)) {
    throw BadParams("parameter " + key + " expects a number, got '" + text + "'");
  }
  return x;
}

int parse_int(const std::string& key, const std::string& text) {
  const double x = parse_double(key, text);
  if (x != std::floor(x) || std::abs(x) > 1e6) {
    throw BadParams("parameter " + key + " expects an integer, got '" + text + "'");
  }
  return static_cast<int>(x);
}

// Tracks which keys a catalog entry consumed so leftovers can be rejected.
class ParamReader {
 public:
  ParamReader(std::string surface, const ParamMap& params) : surface_(std::move(surface)), params_(params) {}

  std::optional<std::string> raw(const std::string& key) {
    used_.push_back(key);
    auto it = params_.find(key);
    if (it == params_.end()) return std::nullopt;
    return it->second;
  }
  double real(const std::string& key, double fallback) {
    auto r = raw(key);
    return r ? parse_double(key, *r) : fallback;
  }
  int integer(const std::string& key, int fallback) {
    auto r = raw(key);
    return r ? parse_int(key, *r) : fallback;
  }
  void apply_domain(ChartDomain& d) {
    d.u_min = real("umin", d.u_min);
    d.u_max = real("umax", d.u_max);
    d.v_min = real("vmin", d.v_min);
    d.v_max = real("vmax", d.v_max);
    d.validate();
  }
  void finish() const {
    for (const auto& [key, value] : params_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        throw BadParams("unknown parameter '" + key + "' for surface " + surface_);
      }
    }
  }

 private:
  std::string surface_;
  const ParamMap& params_;
  std::vector<std::string> used_;
};

void finalize_partial(ImmersionPatch& p) {
  auto partial = p.partial;
  p.partial = [partial, n = p.ambient_dim](int a, int b, double u, double v) -> Vec {
    if (a < 0 || b < 0 || a + b > 3) throw Error("analytic partials are available up to order 3");
    Vec out = partial(a, b, u, v);
    if (out.size() != n) throw Error("catalog partial returned the wrong dimension");
    return out;
  };
}

ImmersionPatch make_plane(ParamReader& pr) {
  const int k = pr.integer("k", 1);
  if (k < 1) throw BadParams("plane_k needs k >= 1");
  ImmersionPatch p;
  p.name = "plane_k";
  p.ambient_dim = 2 + 2 * k;
  pr.apply_domain(p.domain);
  const int n = p.ambient_dim;
  p.eval = [n](double u, double v) {
    Vec x = Vec::Zero(n);
    x(0) = u;
    x(1) = v;
    return x;
  };
  p.partial = [n](int a, int b, double u, double v) {
    Vec x = Vec::Zero(n);
    if (a == 0 && b == 0) {
      x(0) = u;
      x(1) = v;
    } else if (a == 1 && b == 0) {
      x(0) = 1;
    } else if (a == 0 && b == 1) {
      x(1) = 1;
    }
    return x;
  };
  p.traits.holomorphic = true;
  p.traits.flat_normal = true;
  p.params["k"] = std::to_string(k);
  return p;
}

struct GraphOptions {
  std::string name;
  double scale = 1.0;
  double bend = 0.0;  // coefficient of (u^2 + v^2) added to the third coordinate
};

ImmersionPatch make_graph(ParamReader& pr, GraphOptions opt) {
  int k = pr.integer("k", -1);
  std::vector<ComplexPolynomial> polys;
  auto first = pr.raw("p");
  auto p1 = pr.raw("p1");
  if (first && p1) throw BadParams("give either p or p1, not both");
  if (!first) first = p1;
  if (k < 0) {
    k = 1;
    for (int i = 2; i <= 16; ++i) {
      if (pr.raw("p" + std::to_string(i))) k = i;
    }
  }
  if (k < 1) throw BadParams(opt.name + " needs k >= 1");
  for (int i = 1; i <= k; ++i) {
    std::optional<std::string> text = (i == 1) ? first : pr.raw("p" + std::to_string(i));
    ComplexPolynomial poly;
    if (text) {
      poly = ComplexPolynomial::parse(*text);
    } else {
      std::vector<cd> c(static_cast<std::size_t>(i + 2), cd(0, 0));
      c.back() = 1.0;
      poly = ComplexPolynomial(c);
    }
    polys.push_back(poly);
  }
  if (opt.name == "scaled_graph") opt.scale = pr.real("scale", opt.scale);
  if (opt.name == "perturbed_graph") opt.bend = pr.real("eps", opt.bend);

  ImmersionPatch p;
  p.name = opt.name;
  p.ambient_dim = 2 + 2 * k;
  pr.apply_domain(p.domain);
  const double scale = opt.scale;
  const double bend = opt.bend;
  p.partial = [polys, scale, bend, n = p.ambient_dim](int a, int b, double u, double v) {
    Vec x = Vec::Zero(n);
    const cd z(u, v);
    const int d = a + b;
    if (d == 0) {
      x(0) = u;
      x(1) = v;
    } else if (d == 1) {
      x(a == 1 ? 0 : 1) = 1.0;
    }
    cd ib(1, 0);
    for (int t = 0; t < b; ++t) ib *= cd(0, 1);
    for (std::size_t i = 0; i < polys.size(); ++i) {
      const cd w = scale * ib * polys[i].derivative(d, z);
      x(2 + 2 * i) = w.real();
      x(3 + 2 * i) = w.imag();
    }
    if (bend != 0.0) {
      double r = 0.0;
      if (d == 0) r = u * u + v * v;
      else if (a == 1 && b == 0) r = 2 * u;
      else if (a == 0 && b == 1) r = 2 * v;
      else if ((a == 2 && b == 0) || (a == 0 && b == 2)) r = 2.0;
      x(2) += bend * r;
    }
    return x;
  };
  p.eval = [f = p.partial](double u, double v) { return f(0, 0, u, v); };
  p.normal_hint = NormalStructureHint::ambient_restriction;
  p.traits.minimal = bend == 0.0;
  p.traits.holomorphic = bend == 0.0;
  p.traits.flat_normal = false;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    p.params["p" + std::to_string(i + 1)] = polys[i].to_string();
  }
  p.params["k"] = std::to_string(k);
  if (opt.name == "scaled_graph") p.params["scale"] = std::to_string(scale);
  if (opt.name == "perturbed_graph") p.params["eps"] = std::to_string(bend);
  return p;
}

ImmersionPatch make_catenoid(ParamReader& pr) {
  const double tmax = pr.real("tmax", 2.0);
  const double thetamax = pr.real("thetamax", std::numbers::pi);
  if (!(tmax > 0) || !(thetamax > 0)) throw BadParams("catenoid_r6 needs tmax > 0 and thetamax > 0");
  ImmersionPatch p;
  p.name = "catenoid_r6";
  p.ambient_dim = 6;
  p.domain.u_min = -tmax;
  p.domain.u_max = tmax;
  p.domain.v_min = -thetamax;
  p.domain.v_max = thetamax;
  pr.apply_domain(p.domain);
  p.partial = [](int a, int b, double t, double th) {
    Vec x = Vec::Zero(6);
    // d^a/dt^a cosh t alternates cosh/sinh; d^b/dth^b of (cos, sin) rotates by b quarter turns.
    const double ch = (a % 2 == 0) ? std::cosh(t) : std::sinh(t);
    const double phase = th + b * std::numbers::pi / 2;
    x(0) = ch * std::cos(phase);
    x(1) = ch * std::sin(phase);
    if (b == 0) {
      if (a == 0) x(2) = t;
      if (a == 1) x(2) = 1.0;
    }
    return x;
  };
  p.eval = [f = p.partial](double u, double v) { return f(0, 0, u, v); };
  p.normal_hint = NormalStructureHint::frame_constant;
  p.traits.flat_normal = true;
  if (p.domain.contains(0.0, 0.0)) p.traits.waist = std::make_pair(0.0, 0.0);
  p.params["tmax"] = std::to_string(tmax);
  p.params["thetamax"] = std::to_string(thetamax);
  return p;
}

ImmersionPatch make_enneper(ParamReader& pr) {
  ImmersionPatch p;
  p.name = "enneper_r6";
  p.ambient_dim = 6;
  pr.apply_domain(p.domain);
  p.partial = [](int a, int b, double u, double v) {
    Vec x = Vec::Zero(6);
    // Monomials u^m v^n with their coefficients in each coordinate.
    struct Term {
      int coord, m, n;
      double c;
    };
    static const Term terms[] = {
        {0, 1, 0, 1.0}, {0, 3, 0, -1.0 / 3}, {0, 1, 2, 1.0},
        {1, 0, 1, -1.0}, {1, 0, 3, 1.0 / 3}, {1, 2, 1, -1.0},
        {2, 2, 0, 1.0}, {2, 0, 2, -1.0},
    };
    for (const Term& t : terms) {
      if (a > t.m || b > t.n) continue;
      double c = t.c;
      for (int i = 0; i < a; ++i) c *= (t.m - i);
      for (int i = 0; i < b; ++i) c *= (t.n - i);
      x(t.coord) += c * std::pow(u, t.m - a) * std::pow(v, t.n - b);
    }
    return x;
  };
  p.eval = [f = p.partial](double u, double v) { return f(0, 0, u, v); };
  p.traits.flat_normal = true;
  return p;
}

}  // namespace

const Vec& Jet3::partial(int a, int b) const {
  if (a < 0 || b < 0 || a + b > order) throw Error("requested partial exceeds jet order");
  switch (a + b) {
    case 0: return require(F, "F");
    case 1: return a == 1 ? require(Fu, "F_u") : require(Fv, "F_v");
    case 2: return a == 2 ? require(Fuu, "F_uu") : (a == 1 ? require(Fuv, "F_uv") : require(Fvv, "F_vv"));
    default: return require(third[static_cast<std::size_t>(b)], "third partial");
  }
}

double jacobian_min_singular_value(const Jet3& jet) {
  Eigen::Matrix2d g;
  g << jet.Fu.squaredNorm(), jet.Fu.dot(jet.Fv), jet.Fu.dot(jet.Fv), jet.Fv.squaredNorm();
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(g, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return std::sqrt(std::max(lmin, 0.0));
}

Jet3 evaluate_jet(const ImmersionPatch& patch, double u, double v, int order) {
  if (order < 1 || order > 3) throw Error("jet order must be 1, 2 or 3");
  Jet3 jet;
  jet.order = order;
  if (patch.jet.mode == JetMode::analytic) {
    check_inside(patch, u, v, 0.0);
    const auto& P = patch.partial;
    jet.F = P(0, 0, u, v);
    jet.Fu = P(1, 0, u, v);
    jet.Fv = P(0, 1, u, v);
    if (order >= 2) {
      jet.Fuu = P(2, 0, u, v);
      jet.Fuv = P(1, 1, u, v);
      jet.Fvv = P(0, 2, u, v);
    }
    if (order >= 3) {
      for (int b = 0; b <= 3; ++b) jet.third[static_cast<std::size_t>(b)] = P(3 - b, b, u, v);
    }
  } else {
    const double h = patch.fd_step();
    check_inside(patch, u, v, (order == 3 ? 2.0 : 1.0) * h);
    const auto& f = patch.eval;
    auto at = [&](int a, int b) { return f(u + a * h, v + b * h); };
    const Vec c = at(0, 0);
    jet.F = c;
    jet.Fu = (at(1, 0) - at(-1, 0)) / (2 * h);
    jet.Fv = (at(0, 1) - at(0, -1)) / (2 * h);
    if (order >= 2) {
      jet.Fuu = (at(1, 0) - 2 * c + at(-1, 0)) / (h * h);
      jet.Fvv = (at(0, 1) - 2 * c + at(0, -1)) / (h * h);
      jet.Fuv = ((at(1, 1) - at(1, -1)) - (at(-1, 1) - at(-1, -1))) / (4 * h * h);
    }
    if (order >= 3) {
      jet.low_accuracy_third = true;
      const double h3 = 2 * h * h * h;
      jet.third[0] = (at(2, 0) - 2 * at(1, 0) + 2 * at(-1, 0) - at(-2, 0)) / h3;
      jet.third[3] = (at(0, 2) - 2 * at(0, 1) + 2 * at(0, -1) - at(0, -2)) / h3;
      jet.third[1] = ((at(1, 1) - 2 * at(0, 1) + at(-1, 1)) - (at(1, -1) - 2 * at(0, -1) + at(-1, -1))) / h3;
      jet.third[2] = ((at(1, 1) - 2 * at(1, 0) + at(1, -1)) - (at(-1, 1) - 2 * at(-1, 0) + at(-1, -1))) / h3;
    }
  }
  if (jacobian_min_singular_value(jet) < kRankTol) {
    std::ostringstream os;
    os << patch.name << ": dF has rank < 2 at (" << u << ", " << v << ")";
    throw DegenerateImmersion(os.str());
  }
  return jet;
}

std::vector<std::string> catalog_names() {
  return {"plane_k", "holo_graph", "catenoid_r6", "enneper_r6", "scaled_graph", "perturbed_graph"};
}

ImmersionPatch builtin_surface(std::string_view name, const ParamMap& params) {
  ParamReader pr{std::string(name), params};
  ImmersionPatch p;
  if (name == "plane_k") {
    p = make_plane(pr);
  } else if (name == "holo_graph") {
    p = make_graph(pr, {"holo_graph"});
  } else if (name == "scaled_graph") {
    p = make_graph(pr, {"scaled_graph", 2.0, 0.0});
  } else if (name == "perturbed_graph") {
    p = make_graph(pr, {"perturbed_graph", 1.0, 0.2});
  } else if (name == "catenoid_r6") {
    p = make_catenoid(pr);
  } else if (name == "enneper_r6") {
    p = make_enneper(pr);
  } else {
    throw UnknownSurface("unknown surface '" + std::string(name) + "'");
  }
  pr.finish();
  finalize_partial(p);
  p.eval_margin = p.domain.extent();
  for (const char* key : {"umin", "umax", "vmin", "vmax"}) {
    if (auto it = params.find(key); it != params.end()) p.params[key] = it->second;
  }
  return p;
}

// ---------------------------------------------------------------------------

ComplexPolynomial::ComplexPolynomial(std::vector<std::complex<double>> coefficients)
    : coeffs_(std::move(coefficients)) {
  while (!coeffs_.empty() && coeffs_.back() == cd(0, 0)) coeffs_.pop_back();
}

std::complex<double> ComplexPolynomial::derivative(int d, std::complex<double> z) const {
  cd acc(0, 0);
  for (int n = static_cast<int>(coeffs_.size()) - 1; n >= d; --n) {
    double falling = 1.0;
    for (int t = 0; t < d; ++t) falling *= (n - t);
    acc = acc * z + coeffs_[static_cast<std::size_t>(n)] * falling;
  }
  return acc;
}

namespace {

class PolyParser {
 public:
  explicit PolyParser(std::string_view s) {
    for (char c : s) {
      if (!std::isspace(static_cast<unsigned char>(c))) text_.push_back(c);
    }
  }

  std::vector<cd> run() {
    if (text_.empty()) fail("empty polynomial");
    std::vector<cd> coeffs;
    bool first = true;
    while (pos_ < text_.size()) {
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = take() == '-' ? -1.0 : 1.0;
      } else if (!first) {
        fail("expected + or -");
      }
      first = false;
      auto [c, n] = term();
      if (coeffs.size() <= static_cast<std::size_t>(n)) coeffs.resize(static_cast<std::size_t>(n) + 1, cd(0, 0));
      coeffs[static_cast<std::size_t>(n)] += sign * c;
    }
    return coeffs;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  char take() { return text_[pos_++]; }
  [[noreturn]] void fail(const std::string& why) const {
    throw BadParams("cannot parse polynomial '" + text_ + "': " + why);
  }

  double number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return x;
  }

  // coefficient: number, number i, i, or (a+bi)
  cd coefficient() {
    if (peek() == '(') {
      take();
      PolyParser inner(std::string_view(text_).substr(pos_, text_.find(')', pos_) - pos_));
      const std::size_t close = text_.find(')', pos_);
      if (close == std::string::npos) fail("missing )");
      auto c = inner.run();
      if (c.size() > 1) fail("z inside a coefficient");
      pos_ = close + 1;
      return c.empty() ? cd(0, 0) : c[0];
    }
    if (peek() == 'i') {
      take();
      return cd(0, 1);
    }
    const double x = number();
    if (peek() == 'i') {
      take();
      return cd(0, x);
    }
    return cd(x, 0);
  }

  std::pair<cd, int> term() {
    cd c(1, 0);
    if (peek() != 'z') {
      c = coefficient();
      if (peek() == '*') {
        take();
        if (peek() != 'z') fail("expected z after *");
      }
    }
    int n = 0;
    if (peek() == 'z') {
      take();
      n = 1;
      if (peek() == '^') {
        take();
        const double e = number();
        if (e < 0 || e != std::floor(e) || e > 64) fail("exponent must be a small non-negative integer");
        n = static_cast<int>(e);
      }
    }
    return {c, n};
  }

  std::string text_;
  std::size_t pos_ = 0;
};

std::string format_real(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

ComplexPolynomial ComplexPolynomial::parse(std::string_view text) {
  return ComplexPolynomial(PolyParser(text).run());
}

std::string ComplexPolynomial::to_string() const {
  if (coeffs_.empty()) return "0";
  std::string out;
  for (int n = static_cast<int>(coeffs_.size()) - 1; n >= 0; --n) {
    const cd c = coeffs_[static_cast<std::size_t>(n)];
    if (c == cd(0, 0)) continue;
    std::string coef;
    if (c.imag() == 0) {
      coef = format_real(c.real());
    } else if (c.real() == 0) {
      coef = format_real(c.imag()) + "i";
    } else {
      coef = "(" + format_real(c.real()) + (c.imag() < 0 ? "" : "+") + format_real(c.imag()) + "i)";
    }
    std::string mono = n == 0 ? "" : (n == 1 ? "z" : "z^" + std::to_string(n));
    std::string piece;
    if (n > 0 && c == cd(1, 0)) piece = mono;
    else if (n > 0) piece = coef + "*" + mono;
    else piece = coef;
    if (!out.empty() && piece.front() != '-') out += "+";
    out += piece;
  }
  return out;
}

}  // namespace minsurf
