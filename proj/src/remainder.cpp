#include "slowflow/remainder.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slowflow/norms.hpp"
#include "slowflow/spectral.hpp"

namespace slowflow {

void fill_background(const VectorField& v_app, BackgroundPhys& out) {
  for (int c = 0; c < 3; ++c)
    detail::physical_masked(v_app[c], DealiasMode::all_axes, out.p[c]);
}

namespace {

VectorField remainder_rhs_phys(const VectorField& R,
                               const BackgroundPhys& vapp_phys,
                               const VectorField& F) {
  const GridPtr& grid = R.grid();

  BackgroundPhys rp;
  fill_background(R, rp);

  VectorField adv = F;  // accumulate F + advection, negate, project
  // R.grad R, divergence form: symmetric products once
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const ScalarField pij = detail::forward_masked_product(
          grid, rp.p[i], rp.p[j], DealiasMode::all_axes);
      detail::add_derivative(adv[i], pij, j + 1);
      if (i != j) detail::add_derivative(adv[j], pij, i + 1);
    }
  // v_app.grad R + R.grad v_app: d_j(R_i V_j + V_i R_j)
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const ScalarField pij = detail::forward_masked_product(
          grid, rp.p[i], vapp_phys.p[j], DealiasMode::all_axes);
      detail::add_derivative(adv[i], pij, j + 1);
      detail::add_derivative(adv[j], pij, i + 1);
    }

  // Subtracting the v_app identity (... = -grad p_app + F) from (NS) puts
  // the forcing on the remainder's right-hand side with a minus sign; the
  // u = v_app + R cross-validation pins it.
  adv *= -1.0;
  return weighted_leray_project(adv);
}

}  // namespace

VectorField ns3d_rhs(const VectorField& u) {
  return weighted_leray_project(-1.0 * advect_div(u, u));
}

VectorField ns3d_step(const VectorField& u, double dt, StepInfo* info) {
  if (dt <= 0.0) throw std::invalid_argument("ns3d_step: dt must be > 0");
  if (info) {
    const Grid& g = u.g();
    const double kmax = std::max({std::numbers::pi * g.n1() / g.L1(),
                                  std::numbers::pi * g.n2() / g.L2(),
                                  std::numbers::pi * g.n3() / g.L3()});
    info->cfl = dt * linf_norm(u) * kmax;
    info->cfl_warning = info->cfl >= 1.0;
  }
  VectorField n0 = ns3d_rhs(u);
  VectorField pred = u;
  pred.axpy(dt, n0);
  heat_propagate_inplace(pred, dt);
  const VectorField n1 = ns3d_rhs(pred);
  heat_propagate_inplace(n0, dt);
  VectorField out = u;
  heat_propagate_inplace(out, dt);
  out.axpy(0.5 * dt, n0);
  out.axpy(0.5 * dt, n1);
  out.enforce_zero_mean();
  if (!out.finite()) throw NumericalError("ns3d_step: NaN detected");
  return out;
}

VectorField remainder_rhs(const VectorField& R, const VectorField& v_app,
                          const VectorField& F) {
  require_same_grid(R[0], v_app[0], "remainder_rhs");
  require_same_grid(R[0], F[0], "remainder_rhs");
  BackgroundPhys vp;
  fill_background(v_app, vp);
  return remainder_rhs_phys(R, vp, F);
}

VectorField remainder_step(const VectorField& R, const VectorField& vapp_t,
                           const VectorField& F_t, const VectorField& vapp_tdt,
                           const VectorField& F_tdt, double dt) {
  BackgroundPhys vp_t, vp_tdt;
  fill_background(vapp_t, vp_t);
  fill_background(vapp_tdt, vp_tdt);
  return remainder_step(R, vp_t, F_t, vp_tdt, F_tdt, dt);
}

VectorField remainder_step(const VectorField& R, const BackgroundPhys& vp_t,
                           const VectorField& F_t,
                           const BackgroundPhys& vp_tdt,
                           const VectorField& F_tdt, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("remainder_step: dt must be > 0");
  VectorField n0 = remainder_rhs_phys(R, vp_t, F_t);
  VectorField pred = R;
  pred.axpy(dt, n0);
  heat_propagate_inplace(pred, dt);
  const VectorField n1 = remainder_rhs_phys(pred, vp_tdt, F_tdt);
  heat_propagate_inplace(n0, dt);
  VectorField out = R;
  heat_propagate_inplace(out, dt);
  out.axpy(0.5 * dt, n0);
  out.axpy(0.5 * dt, n1);
  out.enforce_zero_mean();
  if (!out.finite()) throw NumericalError("remainder_step: NaN detected");
  return out;
}

double grad_linfv_l2h(const VectorField& f) {
  std::vector<double> acc;
  for (int c = 0; c < f.ncomp(); ++c)
    for (int axis = 1; axis <= 3; ++axis) {
      if (!f.g().active(axis)) continue;
      const auto per_plane = planewise_hsh(derivative(f[c], axis), 0.0);
      if (acc.empty())
        acc.assign(per_plane.size(), 0.0);
      for (std::size_t i = 0; i < per_plane.size(); ++i)
        acc[i] += per_plane[i] * per_plane[i];
    }
  double worst = 0.0;
  for (double v : acc) worst = std::max(worst, v);
  return std::sqrt(worst);
}

double veps_value(const VectorField& v_app) {
  const double a = linf_norm(v_app);
  const double b = grad_linfv_l2h(v_app);
  return a * a + b * b;
}

double WeightSeries::weight(std::size_t i) const {
  return std::exp(-lambda * integral.at(i));
}

WeightSeries weight_Veps(const std::vector<double>& times,
                         const std::vector<double>& veps_samples,
                         double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("weight_Veps: lambda must be > 0");
  if (times.size() != veps_samples.size() || times.empty())
    throw std::invalid_argument("weight_Veps: bad sample arrays");
  WeightSeries out;
  out.lambda = lambda;
  out.times = times;
  out.veps = veps_samples;
  out.integral.resize(times.size(), 0.0);
  for (std::size_t i = 1; i < times.size(); ++i)
    out.integral[i] = out.integral[i - 1] +
                      0.5 * (times[i] - times[i - 1]) *
                          (veps_samples[i] + veps_samples[i - 1]);
  return out;
}

}  // namespace slowflow
