#include "slowflow/field.hpp"

#include <cmath>

namespace slowflow {

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(*this, o, "ScalarField::operator+=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  zero_mean_ = zero_mean_ && o.zero_mean_;
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(*this, o, "ScalarField::operator-=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  zero_mean_ = zero_mean_ && o.zero_mean_;
  return *this;
}

ScalarField& ScalarField::operator*=(double a) {
  for (auto& v : c_) v *= a;
  return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& x) {
  require_same_grid(*this, x, "ScalarField::axpy");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += a * x.c_[i];
  zero_mean_ = zero_mean_ && x.zero_mean_;
  return *this;
}

double ScalarField::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& v : c_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::finite() const {
  for (const auto& v : c_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

VectorField& VectorField::operator+=(const VectorField& o) {
  if (ncomp() != o.ncomp())
    throw std::invalid_argument("VectorField::operator+=: component mismatch");
  for (int c = 0; c < ncomp(); ++c) comp_[c] += o.comp_[c];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  if (ncomp() != o.ncomp())
    throw std::invalid_argument("VectorField::operator-=: component mismatch");
  for (int c = 0; c < ncomp(); ++c) comp_[c] -= o.comp_[c];
  return *this;
}

VectorField& VectorField::operator*=(double a) {
  for (auto& c : comp_) c *= a;
  return *this;
}

VectorField& VectorField::axpy(double a, const VectorField& x) {
  if (ncomp() != x.ncomp())
    throw std::invalid_argument("VectorField::axpy: component mismatch");
  for (int c = 0; c < ncomp(); ++c) comp_[c].axpy(a, x.comp_[c]);
  return *this;
}

double VectorField::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& c : comp_) m = std::max(m, c.max_abs_coeff());
  return m;
}

bool VectorField::finite() const {
  for (const auto& c : comp_)
    if (!c.finite()) return false;
  return true;
}

}  // namespace slowflow
