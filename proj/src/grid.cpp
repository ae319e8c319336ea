#include "slowflow/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace slowflow {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<double> wavenumber_table(int n, double L) {
  std::vector<double> k(n, 0.0);
  if (n == 1) return k;
  const double scale = 2.0 * std::numbers::pi / L;
  for (int i = 0; i < n; ++i) k[i] = Grid::signed_mode(i, n) * scale;
  return k;
}

}  // namespace

Grid::Grid(int n1, int n2, int n3, double L1, double L2, double L3)
    : n1_(n1), n2_(n2), n3_(n3), L1_(L1), L2_(L2), L3_(L3),
      k1_(wavenumber_table(n1, L1)), k2_(wavenumber_table(n2, L2)),
      k3_(wavenumber_table(n3, L3 > 0.0 ? L3 : 1.0)) {}

bool Grid::dealias_keep(int i1, int i2, int i3) const {
  const int m1 = signed_mode(i1, n1_);
  const int m2 = signed_mode(i2, n2_);
  const int m3 = signed_mode(i3, n3_);
  if (3 * std::abs(m1) >= n1_) return false;
  if (3 * std::abs(m2) >= n2_) return false;
  if (n3_ > 1 && 3 * std::abs(m3) >= n3_) return false;
  return true;
}

GridPtr make_grid(int n1, int n2, int n3, double L1, double L2, double L3) {
  auto check_count = [](int n, const char* name) {
    if (!power_of_two(n) || n < 8)
      throw std::invalid_argument(std::string("make_grid: ") + name +
                                  " must be a power of two >= 8");
  };
  check_count(n1, "n1");
  check_count(n2, "n2");
  if (n3 != 1) check_count(n3, "n3");
  if (L1 <= 0.0 || L2 <= 0.0)
    throw std::invalid_argument("make_grid: box lengths must be positive");
  if (n3 != 1 && L3 <= 0.0)
    throw std::invalid_argument("make_grid: L3 must be positive on 3D grids");
  return std::make_shared<const Grid>(n1, n2, n3, L1, L2, L3);
}

GridPtr make_grid(int n1, int n2, double L1, double L2) {
  return make_grid(n1, n2, 1, L1, L2, 0.0);
}

}  // namespace slowflow
