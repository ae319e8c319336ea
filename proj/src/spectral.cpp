#include "slowflow/spectral.hpp"

#include <cmath>
#include <cstring>

#include "slowflow/fft.hpp"

namespace slowflow {

namespace {

std::vector<cplx> backward_complex(const ScalarField& f) {
  std::vector<cplx> out(f.g().size());
  detail::dft(f.g(), f.coeffs().data(), out.data(), +1);
  return out;
}

ScalarField forward_scaled(const GridPtr& grid, const std::vector<cplx>& phys) {
  std::vector<cplx> c(grid->size());
  detail::dft(*grid, phys.data(), c.data(), -1);
  const double inv_n = 1.0 / double(grid->size());
  for (auto& v : c) v *= inv_n;
  return ScalarField(grid, std::move(c));
}

std::vector<cplx>& scratch_cplx(std::size_t n) {
  thread_local std::vector<cplx> buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

bool keep_mode(const Grid& g, int i1, int i2, int i3, DealiasMode mode) {
  return mode == DealiasMode::horizontal_only ? g.dealias_keep(i1, i2, 0)
                                              : g.dealias_keep(i1, i2, i3);
}

}  // namespace

namespace detail {

void physical_masked(const ScalarField& f, DealiasMode mode,
                     std::vector<double>& out) {
  const Grid& g = f.g();
  const std::size_t n = g.size();
  auto& tmp = scratch_cplx(n);
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2) {
      const std::size_t base = g.index(i1, i2, 0);
      for (int i3 = 0; i3 < g.n3(); ++i3)
        tmp[base + i3] = keep_mode(g, i1, i2, i3, mode)
                             ? f[base + i3]
                             : cplx{0.0, 0.0};
    }
  detail::dft(g, tmp.data(), tmp.data(), +1);
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = tmp[i].real();
}

void physical_masked_derivative(const ScalarField& f, int axis,
                                DealiasMode mode, std::vector<double>& out) {
  const Grid& g = f.g();
  if (!g.active(axis))
    throw std::invalid_argument("physical_masked_derivative: inactive axis");
  const std::size_t n = g.size();
  auto& tmp = scratch_cplx(n);
  const auto& k = g.k(axis);
  const int na = g.n(axis);
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2) {
      const std::size_t base = g.index(i1, i2, 0);
      for (int i3 = 0; i3 < g.n3(); ++i3) {
        const int ia = axis == 1 ? i1 : axis == 2 ? i2 : i3;
        if (2 * ia == na || !keep_mode(g, i1, i2, i3, mode)) {
          tmp[base + i3] = cplx{0.0, 0.0};
          continue;
        }
        const cplx c = f[base + i3];
        tmp[base + i3] = cplx{-k[ia] * c.imag(), k[ia] * c.real()};
      }
    }
  detail::dft(g, tmp.data(), tmp.data(), +1);
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = tmp[i].real();
}

void add_derivative(ScalarField& acc, const ScalarField& f, int axis) {
  const Grid& g = f.g();
  if (!g.active(axis))
    throw std::invalid_argument("add_derivative: inactive axis");
  const auto& k = g.k(axis);
  const int na = g.n(axis);
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2) {
      const std::size_t base = g.index(i1, i2, 0);
      for (int i3 = 0; i3 < g.n3(); ++i3) {
        const int ia = axis == 1 ? i1 : axis == 2 ? i2 : i3;
        if (2 * ia == na) continue;
        const cplx c = f[base + i3];
        acc[base + i3] += cplx{-k[ia] * c.imag(), k[ia] * c.real()};
      }
    }
}

ScalarField forward_masked(const GridPtr& grid,
                           std::span<const double> product,
                           DealiasMode mode) {
  const Grid& g = *grid;
  const std::size_t n = g.size();
  auto& tmp = scratch_cplx(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = cplx{product[i], 0.0};
  detail::dft(g, tmp.data(), tmp.data(), -1);
  const double inv_n = 1.0 / double(n);
  ScalarField out(grid);
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2) {
      const std::size_t base = g.index(i1, i2, 0);
      for (int i3 = 0; i3 < g.n3(); ++i3)
        out[base + i3] = keep_mode(g, i1, i2, i3, mode)
                             ? tmp[base + i3] * inv_n
                             : cplx{0.0, 0.0};
    }
  return out;
}

ScalarField forward_masked_product(const GridPtr& grid,
                                   std::span<const double> a,
                                   std::span<const double> b,
                                   DealiasMode mode) {
  const Grid& g = *grid;
  const std::size_t n = g.size();
  auto& tmp = scratch_cplx(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = cplx{a[i] * b[i], 0.0};
  detail::dft(g, tmp.data(), tmp.data(), -1);
  const double inv_n = 1.0 / double(n);
  ScalarField out(grid);
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2) {
      const std::size_t base = g.index(i1, i2, 0);
      for (int i3 = 0; i3 < g.n3(); ++i3)
        out[base + i3] = keep_mode(g, i1, i2, i3, mode)
                             ? tmp[base + i3] * inv_n
                             : cplx{0.0, 0.0};
    }
  return out;
}

}  // namespace detail

std::vector<double> to_physical(const ScalarField& f) {
  auto z = backward_complex(f);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
  return out;
}

std::vector<cplx> to_physical_complex(const ScalarField& f) {
  return backward_complex(f);
}

ScalarField from_physical(const GridPtr& grid, std::span<const double> values) {
  if (values.size() != grid->size())
    throw std::invalid_argument("from_physical: size mismatch");
  std::vector<cplx> phys(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) phys[i] = cplx{values[i], 0.0};
  return forward_scaled(grid, phys);
}

ScalarField derivative(const ScalarField& f, int axis) {
  const Grid& g = f.g();
  if (axis < 1 || axis > 3 || !g.active(axis))
    throw std::invalid_argument("derivative: inactive axis");
  ScalarField out(f.grid(), f.zero_mean());
  const auto& k = g.k(axis);
  const int n = g.n(axis);
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2)
      for (int i3 = 0; i3 < g.n3(); ++i3) {
        const int ia = axis == 1 ? i1 : axis == 2 ? i2 : i3;
        if (2 * ia == n) continue;  // Nyquist: keep output real
        const std::size_t idx = g.index(i1, i2, i3);
        out[idx] = cplx{0.0, k[ia]} * f[idx];
      }
  return out;
}

VectorField derivative(const VectorField& f, int axis) {
  std::vector<ScalarField> comps;
  comps.reserve(f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c) comps.push_back(derivative(f[c], axis));
  return VectorField(std::move(comps));
}

void heat_propagate_inplace(ScalarField& f, double t,
                            std::array<double, 3> weights) {
  if (t < 0.0) throw std::invalid_argument("heat_propagate: negative time");
  for (double w : weights)
    if (w < 0.0) throw std::invalid_argument("heat_propagate: negative weight");
  const Grid& g = f.g();
  // separable multiplier: three per-axis exp tables instead of N exps
  auto axis_table = [&](int axis, double w) {
    std::vector<double> tab(g.n(axis));
    for (int i = 0; i < g.n(axis); ++i) {
      const double k = g.k(axis)[i];
      tab[i] = std::exp(-t * w * k * k);
    }
    return tab;
  };
  const auto e1 = axis_table(1, weights[0]);
  const auto e2 = axis_table(2, weights[1]);
  const auto e3 = axis_table(3, weights[2]);
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2) {
      const double e12 = e1[i1] * e2[i2];
      const std::size_t base = g.index(i1, i2, 0);
      for (int i3 = 0; i3 < g.n3(); ++i3) f[base + i3] *= e12 * e3[i3];
    }
}

void heat_propagate_inplace(VectorField& f, double t,
                            std::array<double, 3> weights) {
  for (int c = 0; c < f.ncomp(); ++c)
    heat_propagate_inplace(f[c], t, weights);
}

ScalarField heat_propagate(const ScalarField& f, double t,
                           std::array<double, 3> weights) {
  ScalarField out = f;
  heat_propagate_inplace(out, t, weights);
  return out;
}

VectorField heat_propagate(const VectorField& f, double t,
                           std::array<double, 3> weights) {
  std::vector<ScalarField> comps;
  comps.reserve(f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c)
    comps.push_back(heat_propagate(f[c], t, weights));
  VectorField out(std::move(comps));
  out.div_weights = f.div_weights;
  return out;
}

VectorField weighted_leray_project(const VectorField& u, double m) {
  if (m <= 0.0)
    throw std::invalid_argument("weighted_leray_project: weight m <= 0");
  const Grid& g = u.g();
  const int nc = u.ncomp();
  if (nc != 2 && nc != 3)
    throw std::invalid_argument("weighted_leray_project: need 2 or 3 components");
  if (nc == 3 && g.is2d())
    throw std::invalid_argument("weighted_leray_project: 3 components on 2D grid");

  VectorField out = u;
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2)
      for (int i3 = 0; i3 < g.n3(); ++i3) {
        const double k1 = g.k1(i1), k2 = g.k2(i2);
        const double k3 = nc == 3 ? g.k3(i3) : 0.0;
        const double denom = k1 * k1 + k2 * k2 + m * k3 * k3;
        if (denom == 0.0) continue;  // zero mode passes through
        const std::size_t idx = g.index(i1, i2, i3);
        cplx kd = k1 * u[0][idx] + k2 * u[1][idx];
        if (nc == 3) kd += k3 * u[2][idx];
        kd /= denom;
        out[0][idx] -= k1 * kd;
        out[1][idx] -= k2 * kd;
        if (nc == 3) out[2][idx] -= m * k3 * kd;
      }
  out.div_weights = {1.0, 1.0, 1.0};
  return out;
}

ScalarField divergence(const VectorField& u, std::array<double, 3> weights) {
  const Grid& g = u.g();
  ScalarField out(u.grid(), true);
  const int nc = u.ncomp();
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2)
      for (int i3 = 0; i3 < g.n3(); ++i3) {
        const std::size_t idx = g.index(i1, i2, i3);
        cplx d = weights[0] * g.k1(i1) * u[0][idx] +
                 weights[1] * g.k2(i2) * u[1][idx];
        if (nc == 3) d += weights[2] * g.k3(i3) * u[2][idx];
        out[idx] = cplx{0.0, 1.0} * d;
      }
  return out;
}

double divergence_defect(const VectorField& u, std::array<double, 3> weights) {
  const double mag = u.max_abs_coeff();
  if (mag == 0.0) return 0.0;
  return divergence(u, weights).max_abs_coeff() / mag;
}

ScalarField dealias(const ScalarField& f, DealiasMode mode) {
  const Grid& g = f.g();
  ScalarField out = f;
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2)
      for (int i3 = 0; i3 < g.n3(); ++i3) {
        const bool keep = mode == DealiasMode::horizontal_only
                              ? g.dealias_keep(i1, i2, 0)
                              : g.dealias_keep(i1, i2, i3);
        if (!keep) out.at(i1, i2, i3) = cplx{0.0, 0.0};
      }
  return out;
}

VectorField dealias(const VectorField& f, DealiasMode mode) {
  std::vector<ScalarField> comps;
  comps.reserve(f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c) comps.push_back(dealias(f[c], mode));
  VectorField out(std::move(comps));
  out.div_weights = f.div_weights;
  return out;
}

ScalarField multiply_dealiased(const ScalarField& a, const ScalarField& b,
                               DealiasMode mode) {
  require_same_grid(a, b, "multiply_dealiased");
  std::vector<double> pa, pb;
  detail::physical_masked(a, mode, pa);
  detail::physical_masked(b, mode, pb);
  for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
  return detail::forward_masked(a.grid(), pa, mode);
}

VectorField convect(const VectorField& u, const VectorField& b,
                    std::array<int, 3> axes, DealiasMode mode) {
  require_same_grid(u[0], b[0], "convect");
  const GridPtr& grid = b.grid();
  const std::size_t npts = grid->size();

  std::vector<std::vector<double>> u_phys(u.ncomp());
  for (int j = 0; j < u.ncomp(); ++j)
    detail::physical_masked(u[j], mode, u_phys[j]);

  std::vector<ScalarField> comps;
  comps.reserve(b.ncomp());
  std::vector<double> acc(npts), db;
  for (int i = 0; i < b.ncomp(); ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int j = 0; j < u.ncomp(); ++j) {
      detail::physical_masked_derivative(b[i], axes[j], mode, db);
      for (std::size_t p = 0; p < npts; ++p) acc[p] += u_phys[j][p] * db[p];
    }
    comps.push_back(detail::forward_masked(grid, acc, mode));
  }
  return VectorField(std::move(comps));
}

VectorField advect_div(const VectorField& u, const VectorField& b,
                       DealiasMode mode) {
  require_same_grid(u[0], b[0], "advect_div");
  const GridPtr& grid = b.grid();
  const int nj = u.ncomp();

  std::vector<std::vector<double>> u_phys(nj);
  for (int j = 0; j < nj; ++j) detail::physical_masked(u[j], mode, u_phys[j]);

  const bool self = &u == &b;
  std::vector<ScalarField> comps;
  comps.reserve(b.ncomp());
  std::vector<double> bi;
  for (int i = 0; i < b.ncomp(); ++i) {
    if (!self) detail::physical_masked(b[i], mode, bi);
    const std::vector<double>& bphys = self ? u_phys[i] : bi;
    ScalarField acc(grid);
    for (int j = 0; j < nj; ++j)
      detail::add_derivative(
          acc, detail::forward_masked_product(grid, bphys, u_phys[j], mode),
          j + 1);
    comps.push_back(std::move(acc));
  }
  return VectorField(std::move(comps));
}

double conjugate_symmetry_defect(const ScalarField& f) {
  const Grid& g = f.g();
  const double mag = f.max_abs_coeff();
  if (mag == 0.0) return 0.0;
  double worst = 0.0;
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2)
      for (int i3 = 0; i3 < g.n3(); ++i3) {
        const int j1 = (g.n1() - i1) % g.n1();
        const int j2 = (g.n2() - i2) % g.n2();
        const int j3 = (g.n3() - i3) % g.n3();
        const cplx d = f.at(i1, i2, i3) - std::conj(f.at(j1, j2, j3));
        worst = std::max(worst, std::abs(d));
      }
  return worst / mag;
}

}  // namespace slowflow
