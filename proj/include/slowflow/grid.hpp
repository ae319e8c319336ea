#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace slowflow {

// Periodic box: n_j modes per axis, box lengths L_j, integer wavenumbers
// scaled by 2*pi/L_j in standard FFT order {0, 1, ..., n/2-1, -n/2, ..., -1}.
// A 2D grid is encoded as n3 == 1 (L3 unused, vertical wavenumber 0).
class Grid {
public:
  Grid(int n1, int n2, int n3, double L1, double L2, double L3);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int n3() const { return n3_; }
  int n(int axis) const { return axis == 1 ? n1_ : axis == 2 ? n2_ : n3_; }
  double L1() const { return L1_; }
  double L2() const { return L2_; }
  double L3() const { return L3_; }

  bool is2d() const { return n3_ == 1; }
  bool active(int axis) const { return n(axis) > 1; }

  std::size_t size() const { return std::size_t(n1_) * n2_ * n3_; }
  // Row-major over (i1, i2, i3), i3 fastest.
  std::size_t index(int i1, int i2, int i3) const {
    return (std::size_t(i1) * n2_ + i2) * n3_ + i3;
  }

  // Volume of the box over active axes (Plancherel factor).
  double volume() const { return is2d() ? L1_ * L2_ : L1_ * L2_ * L3_; }

  const std::vector<double>& k(int axis) const {
    return axis == 1 ? k1_ : axis == 2 ? k2_ : k3_;
  }
  double k1(int i) const { return k1_[i]; }
  double k2(int i) const { return k2_[i]; }
  double k3(int i) const { return k3_[i]; }

  // Signed integer mode index for position i along an axis.
  static int signed_mode(int i, int n) { return i < (n + 1) / 2 ? i : i - n; }

  // 2/3-rule survivor: a mode m is kept iff 3|m| < n (per active axis).
  bool dealias_keep(int i1, int i2, int i3) const;

  // Collocation coordinate of grid point i along an axis.
  double coord(int axis, int i) const {
    return (axis == 1 ? L1_ : axis == 2 ? L2_ : L3_) * double(i) / n(axis);
  }

  bool same_shape(const Grid& o) const {
    return n1_ == o.n1_ && n2_ == o.n2_ && n3_ == o.n3_ && L1_ == o.L1_ &&
           L2_ == o.L2_ && (is2d() || L3_ == o.L3_);
  }

private:
  int n1_, n2_, n3_;
  double L1_, L2_, L3_;
  std::vector<double> k1_, k2_, k3_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Validates: mode counts powers of two and >= 8 on active axes (n3 == 1
// encodes a 2D grid), lengths positive. Throws std::invalid_argument.
GridPtr make_grid(int n1, int n2, int n3, double L1, double L2, double L3);

// 2D convenience (n3 = 1).
GridPtr make_grid(int n1, int n2, double L1, double L2);

}  // namespace slowflow
