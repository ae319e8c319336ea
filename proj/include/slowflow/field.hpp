#pragma once

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "slowflow/grid.hpp"

namespace slowflow {

using cplx = std::complex<double>;

// Raised when a solver detects NaN/Inf in a state (CLI exit code 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Real periodic scalar field held as spectral coefficients under the
// Fourier-series convention f(x) = sum_k c(k) e^{i k.x}; forward transform
// carries the 1/N normalization, so Plancherel reads
// ||f||_L2^2 = volume * sum |c(k)|^2.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, bool zero_mean = false)
      : grid_(std::move(grid)), c_(grid_->size(), cplx{0.0, 0.0}),
        zero_mean_(zero_mean) {}
  ScalarField(GridPtr grid, std::vector<cplx> coeffs, bool zero_mean = false)
      : grid_(std::move(grid)), c_(std::move(coeffs)), zero_mean_(zero_mean) {
    if (c_.size() != grid_->size())
      throw std::invalid_argument("ScalarField: coefficient count mismatch");
  }

  const GridPtr& grid() const { return grid_; }
  const Grid& g() const { return *grid_; }

  cplx& at(int i1, int i2, int i3) { return c_[grid_->index(i1, i2, i3)]; }
  const cplx& at(int i1, int i2, int i3) const {
    return c_[grid_->index(i1, i2, i3)];
  }
  cplx& operator[](std::size_t i) { return c_[i]; }
  const cplx& operator[](std::size_t i) const { return c_[i]; }

  std::span<cplx> coeffs() { return c_; }
  std::span<const cplx> coeffs() const { return c_; }

  bool zero_mean() const { return zero_mean_; }
  // Zeroes the mean mode and flags the field as mean-free.
  ScalarField& enforce_zero_mean() {
    c_[0] = cplx{0.0, 0.0};
    zero_mean_ = true;
    return *this;
  }

  bool empty() const { return !grid_; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double a);
  // this += a * x, one fused pass
  ScalarField& axpy(double a, const ScalarField& x);
  friend ScalarField operator+(ScalarField a, const ScalarField& b) {
    return a += b;
  }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) {
    return a -= b;
  }
  friend ScalarField operator*(double a, ScalarField f) { return f *= a; }

  // Largest coefficient magnitude (0 for empty fields).
  double max_abs_coeff() const;
  bool finite() const;

private:
  GridPtr grid_;
  std::vector<cplx> c_;
  bool zero_mean_ = false;
};

// 2- or 3-component vector field on one grid. div_weights records the metric
// under which the field was projected solenoidal; the standard divergence
// invariant itself is always checked with weights (1,1,1).
class VectorField {
public:
  VectorField() = default;
  VectorField(GridPtr grid, int ncomp, bool zero_mean = false) {
    comp_.reserve(ncomp);
    for (int c = 0; c < ncomp; ++c) comp_.emplace_back(grid, zero_mean);
  }
  explicit VectorField(std::vector<ScalarField> comps)
      : comp_(std::move(comps)) {
    for (const auto& c : comp_)
      if (!c.grid()->same_shape(*comp_[0].grid()))
        throw std::invalid_argument("VectorField: components on unequal grids");
  }

  int ncomp() const { return int(comp_.size()); }
  const GridPtr& grid() const { return comp_.at(0).grid(); }
  const Grid& g() const { return *grid(); }

  ScalarField& operator[](int c) { return comp_[c]; }
  const ScalarField& operator[](int c) const { return comp_[c]; }

  std::array<double, 3> div_weights{1.0, 1.0, 1.0};

  VectorField& enforce_zero_mean() {
    for (auto& c : comp_) c.enforce_zero_mean();
    return *this;
  }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double a);
  VectorField& axpy(double a, const VectorField& x);
  friend VectorField operator+(VectorField a, const VectorField& b) {
    return a += b;
  }
  friend VectorField operator-(VectorField a, const VectorField& b) {
    return a -= b;
  }
  friend VectorField operator*(double a, VectorField f) { return f *= a; }

  double max_abs_coeff() const;
  bool finite() const;

private:
  std::vector<ScalarField> comp_;
};

inline void require_same_grid(const ScalarField& a, const ScalarField& b,
                              const char* where) {
  if (!a.grid()->same_shape(*b.grid()))
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

}  // namespace slowflow
