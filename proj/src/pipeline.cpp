#include "slowflow/pipeline.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "slowflow/norms.hpp"
#include "slowflow/spectral.hpp"

namespace slowflow {

namespace {

// Zero every (0,0,k3) mode: per-plane horizontal means (Galilean frame
// fixing slice by slice).
void zero_horizontal_mean(VectorField& v) {
  const Grid& g = v.g();
  for (int c = 0; c < v.ncomp(); ++c)
    for (int i3 = 0; i3 < g.n3(); ++i3) v[c].at(0, 0, i3) = cplx{0.0, 0.0};
}

double sq(double x) { return x * x; }

struct ForcingNormsSq {
  double press, lin, nonlin, total;
};

ForcingNormsSq forcing_norms_sq(const ForcingBundle& F) {
  return {sq(hs_norm(F.pressure, -0.5)), sq(hs_norm(F.linear, -0.5)),
          sq(hs_norm(F.nonlinear, -0.5)), sq(hs_norm(F.total, -0.5))};
}

// Advances the externally supplied slow states to t_next and returns
// (v_slow, w) there; fed either by stepping (streaming) or interpolation.
using AdvanceFn =
    std::function<std::pair<VectorField, VectorField>(double t_next)>;

PipelineResult remainder_engine(const VectorField& v_slow0,
                                const VectorField& w0, const EpsParams& ep,
                                const PipelineOptions& opt,
                                const AdvanceFn& advance) {
  const int nsteps = steps_for(ep.T, ep.dt);
  const double dt = ep.dt;
  const int cadence = std::max(1, opt.sample_every);

  PipelineResult res;
  VectorField v_slow = v_slow0;
  VectorField w = w0;
  VectorField vapp = build_vapp_velocity(v_slow, w, ep);
  ForcingBundle F = forcing_feps(v_slow, w, ep);
  BackgroundPhys bg, bg_next;
  fill_background(vapp, bg);
  VectorField R(ep.fast, 3, true);
  VectorField u;
  if (opt.direct_solve) u = vapp;

  const double h12_0 = hs_norm(vapp, 0.5);
  const double ceiling = opt.ceiling_factor * std::max(h12_0, 1e-300);

  // time quadratures (dissipation, forcing L2-in-time) run on the sample
  // cadence, per the trapezoidal-on-cadence convention
  double diss_integral = 0.0;
  double diss_prev = sq(hs_norm(R, 1.5));
  ForcingNormsSq f_prev = forcing_norms_sq(F);
  ForcingNormsSq f_acc{0.0, 0.0, 0.0, 0.0};
  double t_quad = 0.0;

  auto sample = [&](double t) {
    if (t > t_quad) {
      const double h = t - t_quad;
      const double diss_now = sq(hs_norm(R, 1.5));
      diss_integral += 0.5 * h * (diss_prev + diss_now);
      diss_prev = diss_now;
      const ForcingNormsSq f_now = forcing_norms_sq(F);
      f_acc.press += 0.5 * h * (f_prev.press + f_now.press);
      f_acc.lin += 0.5 * h * (f_prev.lin + f_now.lin);
      f_acc.nonlin += 0.5 * h * (f_prev.nonlin + f_now.nonlin);
      f_acc.total += 0.5 * h * (f_prev.total + f_now.total);
      f_prev = f_now;
      t_quad = t;
    }
    res.times.push_back(t);
    const double rn = hs_norm(R, 0.5);
    res.r_h12.push_back(rn);
    res.sup_r_h12 = std::max(res.sup_r_h12, rn);
    res.r_diss_integral.push_back(diss_integral);
    res.veps.push_back(veps_value(vapp));
    res.f_total_norm.push_back(std::sqrt(f_prev.total));
    if (opt.direct_solve) res.u_h12.push_back(hs_norm(u, 0.5));
  };

  sample(0.0);

  StepInfo info;
  for (int k = 0; k < nsteps; ++k) {
    const double t_next = (k + 1) * dt;
    auto [v_next, w_next] = advance(t_next);
    VectorField vapp_next = build_vapp_velocity(v_next, w_next, ep);
    ForcingBundle F_next = forcing_feps(v_next, w_next, ep);
    fill_background(vapp_next, bg_next);

    R = remainder_step(R, bg, F.total, bg_next, F_next.total, dt);
    if (opt.direct_solve) {
      u = ns3d_step(u, dt, k == 0 ? &info : nullptr);
      if (k == 0 && info.cfl_warning) res.cfl_warned = true;
    }

    v_slow = std::move(v_next);
    w = std::move(w_next);
    vapp = std::move(vapp_next);
    F = std::move(F_next);
    std::swap(bg, bg_next);

    const bool at_sample = (k + 1) % cadence == 0 || k + 1 == nsteps;
    if (at_sample) {
      sample(t_next);
      const double un = opt.direct_solve ? hs_norm(u, 0.5) : 0.0;
      if (res.r_h12.back() > ceiling || un > ceiling) {
        res.blowup = true;
        res.blowup_time = t_next;
        break;
      }
    }
  }

  res.f_press_l2t = std::sqrt(f_acc.press);
  res.f_lin_l2t = std::sqrt(f_acc.lin);
  res.f_nonlin_l2t = std::sqrt(f_acc.nonlin);
  res.f_total_l2t = std::sqrt(f_acc.total);
  res.terminal_r_h12 = res.r_h12.back();
  res.R_final = std::move(R);
  res.vapp_final = std::move(vapp);
  if (opt.direct_solve) {
    res.cross_validation_l2 = l2_norm(u - res.vapp_final - res.R_final);
    res.u_final = std::move(u);
  }
  return res;
}

}  // namespace

VectorField build_vapp_velocity(const VectorField& v_slow,
                                const VectorField& w, const EpsParams& ep) {
  std::vector<ScalarField> comps{v_slow[0] + ep.eps * ScalarField(w[0]),
                                 v_slow[1] + ep.eps * ScalarField(w[1]),
                                 w[2]};
  return slow_to_fast(VectorField(std::move(comps)), ep);
}

VectorField slice_stack_step(const VectorField& v_slow, double dt,
                             StepInfo* info) {
  if (dt <= 0.0)
    throw std::invalid_argument("slice_stack_step: dt must be > 0");
  if (info) {
    const Grid& g = v_slow.g();
    const double kmax = std::max(std::numbers::pi * g.n1() / g.L1(),
                                 std::numbers::pi * g.n2() / g.L2());
    info->cfl = dt * linf_norm(v_slow) * kmax;
    info->cfl_warning = info->cfl >= 1.0;
  }
  const std::array<double, 3> wts{1.0, 1.0, 0.0};
  auto rhs = [](const VectorField& v) {
    return weighted_leray_project(
        -1.0 * convect(v, v, {1, 2}, DealiasMode::horizontal_only));
  };
  VectorField n0 = rhs(v_slow);
  VectorField pred = v_slow;
  pred.axpy(dt, n0);
  heat_propagate_inplace(pred, dt, wts);
  const VectorField n1 = rhs(pred);
  heat_propagate_inplace(n0, dt, wts);
  VectorField out = v_slow;
  heat_propagate_inplace(out, dt, wts);
  out.axpy(0.5 * dt, n0);
  out.axpy(0.5 * dt, n1);
  zero_horizontal_mean(out);
  if (!out.finite()) throw NumericalError("slice_stack_step: NaN detected");
  return out;
}

PipelineResult run_pipeline(const SliceState& v0, const VectorField& w0_slow,
                            const EpsParams& ep, const PipelineOptions& opt) {
  VectorField v_slow = slices_to_slow(v0, ep.slow);
  zero_horizontal_mean(v_slow);
  VectorField w = w0_slow;

  StepInfo info;
  bool first = true;
  bool cfl = false;
  auto advance = [&, ep](double t_next) {
    VectorField v_next = slice_stack_step(v_slow, ep.dt, first ? &info : nullptr);
    if (first && info.cfl_warning) cfl = true;
    first = false;
    TransportState ws{t_next - ep.dt, ep.eps, w};
    TransportState wn = transport_step(ws, v_slow, v_next, ep.dt);
    v_slow = v_next;
    w = wn.w;
    return std::make_pair(v_slow, w);
  };

  PipelineResult res = remainder_engine(v_slow, w, ep, opt, advance);
  res.cfl_warned = res.cfl_warned || cfl;
  return res;
}

PipelineResult solve_remainder(const SliceTrajectory& v_traj,
                               const TransportTrajectory& w_traj,
                               const EpsParams& ep,
                               const PipelineOptions& opt) {
  if (v_traj.t_end() + 1e-9 < v_traj.times.front() + ep.T ||
      w_traj.times.back() + 1e-9 < w_traj.times.front() + ep.T)
    throw std::invalid_argument("solve_remainder: trajectories too short");
  const double t0 = v_traj.times.front();
  VectorField v0 = slices_to_slow(v_traj.at(t0), ep.slow);
  VectorField w0 = w_traj.at(t0).w;
  auto advance = [&, t0, ep](double t_next) {
    return std::make_pair(slices_to_slow(v_traj.at(t0 + t_next), ep.slow),
                          w_traj.at(t0 + t_next).w);
  };
  return remainder_engine(v0, w0, ep, opt, advance);
}

}  // namespace slowflow
