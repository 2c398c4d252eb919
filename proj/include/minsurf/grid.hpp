#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "minsurf/error.hpp"

namespace minsurf {

// Rectangular chart domain sampled by an nu x nv node grid (boundary nodes included).
struct ChartDomain {
  double u_min = -1.0;
  double u_max = 1.0;
  double v_min = -1.0;
  double v_max = 1.0;
  int nu = 33;
  int nv = 33;

  void validate() const;

  double hu() const { return (u_max - u_min) / (nu - 1); }
  double hv() const { return (v_max - v_min) / (nv - 1); }
  double u(int i) const { return u_min + i * hu(); }
  double v(int j) const { return v_min + j * hv(); }
  double extent() const;
  bool contains(double u, double v, double inset = 0.0) const;
  ChartDomain with_resolution(int n) const;
  ChartDomain with_resolution(int n_u, int n_v) const;
};

// Interior derivatives use the fourth-order centred difference, which reaches this
// many nodes to each side.
inline constexpr int kStencilRadius = 2;

template <class T>
T centered_difference(const T& minus2, const T& minus1, const T& plus1, const T& plus2, double h) {
  T out = (8.0 * (plus1 - minus1) - (plus2 - minus2)) / (12.0 * h);
  return out;
}

// Node-centred field over a chart grid.  Only nodes at least `margin` cells away
// from the boundary carry meaningful values; the rest hold the default value.
template <class T>
class GridField {
 public:
  GridField() = default;
  GridField(const ChartDomain& domain, int margin, const T& init = T{})
      : domain_(domain), margin_(margin),
        data_(static_cast<std::size_t>(domain.nu) * domain.nv, init) {}

  const ChartDomain& domain() const { return domain_; }
  int margin() const { return margin_; }
  int nu() const { return domain_.nu; }
  int nv() const { return domain_.nv; }

  bool valid(int i, int j) const {
    return i >= margin_ && j >= margin_ && i < domain_.nu - margin_ && j < domain_.nv - margin_;
  }

  T& operator()(int i, int j) { return data_[index(i, j)]; }
  const T& operator()(int i, int j) const { return data_[index(i, j)]; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * domain_.nu + i;
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

 private:
  ChartDomain domain_{};
  int margin_ = 0;
  std::vector<T> data_;
};

}  // namespace minsurf
