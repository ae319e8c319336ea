#include "slowflow/transport.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slowflow/fft.hpp"
#include "slowflow/norms.hpp"
#include "slowflow/spectral.hpp"

namespace slowflow {

VectorField slices_to_slow(const SliceState& s, const GridPtr& slow_grid) {
  const Grid& g = *slow_grid;
  if (s.count() != g.n3())
    throw std::invalid_argument("slices_to_slow: slice count != n3");
  const Grid& h = *s.hgrid;
  if (h.n1() != g.n1() || h.n2() != g.n2())
    throw std::invalid_argument("slices_to_slow: horizontal shape mismatch");

  VectorField out(slow_grid, 2);
  // Fill vertical-physical planes with per-slice spectra, then transform
  // down the vertical axis (forward, 1/n3 normalization).
  for (int c = 0; c < 2; ++c) {
    std::vector<cplx> planes(g.size());
    for (int i3 = 0; i3 < g.n3(); ++i3) {
      const auto& slice = s.v[i3][c];
      for (int i1 = 0; i1 < g.n1(); ++i1)
        for (int i2 = 0; i2 < g.n2(); ++i2)
          planes[g.index(i1, i2, i3)] = slice.at(i1, i2, 0);
    }
    std::vector<cplx> spec(g.size());
    detail::dft_axis3(g, planes.data(), spec.data(), -1);
    const double inv = 1.0 / g.n3();
    for (auto& v : spec) v *= inv;
    out[c] = ScalarField(slow_grid, std::move(spec));
  }
  return out;
}

SliceState slow_to_slices(const VectorField& v, double t) {
  const Grid& g = v.g();
  GridPtr hgrid = make_grid(g.n1(), g.n2(), g.L1(), g.L2());
  SliceState out;
  out.t = t;
  out.hgrid = hgrid;
  out.y3.resize(g.n3());
  for (int i3 = 0; i3 < g.n3(); ++i3) out.y3[i3] = g.coord(3, i3);

  std::vector<std::vector<cplx>> planes(v.ncomp());
  for (int c = 0; c < v.ncomp(); ++c) {
    planes[c].resize(g.size());
    detail::dft_axis3(g, v[c].coeffs().data(), planes[c].data(), +1);
  }
  for (int i3 = 0; i3 < g.n3(); ++i3) {
    std::vector<ScalarField> comps;
    for (int c = 0; c < v.ncomp(); ++c) {
      ScalarField f(hgrid);
      for (int i1 = 0; i1 < g.n1(); ++i1)
        for (int i2 = 0; i2 < g.n2(); ++i2)
          f.at(i1, i2, 0) = planes[c][g.index(i1, i2, i3)];
      comps.push_back(std::move(f));
    }
    out.v.emplace_back(std::move(comps));
  }
  return out;
}

VectorField nh_term(const VectorField& v_slow, const VectorField& w) {
  if (v_slow.ncomp() != 2 || w.ncomp() != 3)
    throw std::invalid_argument("nh_term: need 2-component v and 3-component w");
  require_same_grid(v_slow[0], w[0], "nh_term");

  // v . grad_h w^h, horizontal-only dealiasing (pointwise in y3)
  VectorField wh(std::vector<ScalarField>{w[0], w[1]});
  VectorField adv = convect(v_slow, wh, {1, 2}, DealiasMode::horizontal_only);
  // + d3 (w^3 v)
  for (int i = 0; i < 2; ++i) {
    const ScalarField prod =
        multiply_dealiased(w[2], v_slow[i], DealiasMode::horizontal_only);
    adv[i] += derivative(prod, 3);
  }
  return adv;
}

ScalarField pressure_p1(const VectorField& v_slow, const VectorField& w,
                        double eps) {
  if (eps <= 0.0) throw std::invalid_argument("pressure_p1: eps must be > 0");
  const VectorField nh = nh_term(v_slow, w);
  const Grid& g = nh.g();
  ScalarField p(nh.grid(), true);
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2)
      for (int i3 = 0; i3 < g.n3(); ++i3) {
        const double kh2 = g.k1(i1) * g.k1(i1) + g.k2(i2) * g.k2(i2);
        const double denom = kh2 + eps * eps * g.k3(i3) * g.k3(i3);
        if (denom == 0.0) continue;
        const std::size_t idx = g.index(i1, i2, i3);
        const cplx div_h = cplx{0.0, 1.0} * (g.k1(i1) * nh[0][idx] +
                                             g.k2(i2) * nh[1][idx]);
        p[idx] = div_h / denom;
      }
  return p;
}

double pressure_multiplier_max(const Grid& g, double eps) {
  if (eps <= 0.0)
    throw std::invalid_argument("pressure_multiplier_max: eps must be > 0");
  double worst = 0.0;
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2)
      for (int i3 = 0; i3 < g.n3(); ++i3) {
        const double kh2 = g.k1(i1) * g.k1(i1) + g.k2(i2) * g.k2(i2);
        const double denom = kh2 + eps * eps * g.k3(i3) * g.k3(i3);
        if (denom == 0.0) continue;
        worst = std::max(worst, kh2 / denom);
      }
  return worst;
}

namespace {

VectorField transport_rhs(const VectorField& w, const VectorField& v,
                          double eps) {
  VectorField adv = convect(v, w, {1, 2}, DealiasMode::horizontal_only);
  return weighted_leray_project(-1.0 * adv, eps * eps);
}

}  // namespace

TransportState transport_step(const TransportState& st, const VectorField& v_t,
                              const VectorField& v_tdt, double dt,
                              StepInfo* info) {
  if (dt <= 0.0) throw std::invalid_argument("transport_step: dt must be > 0");
  const double eps = st.eps;
  const std::array<double, 3> wts{1.0, 1.0, eps * eps};
  if (info) {
    const Grid& g = st.w.g();
    const double kmax = std::max(std::numbers::pi * g.n1() / g.L1(),
                                 std::numbers::pi * g.n2() / g.L2());
    info->cfl = dt * linf_norm(v_t) * kmax;
    info->cfl_warning = info->cfl >= 1.0;
  }
  VectorField n0 = transport_rhs(st.w, v_t, eps);
  VectorField pred = st.w;
  pred.axpy(dt, n0);
  heat_propagate_inplace(pred, dt, wts);
  const VectorField n1 = transport_rhs(pred, v_tdt, eps);
  heat_propagate_inplace(n0, dt, wts);
  VectorField w1 = st.w;
  heat_propagate_inplace(w1, dt, wts);
  w1.axpy(0.5 * dt, n0);
  w1.axpy(0.5 * dt, n1);
  w1.enforce_zero_mean();
  if (!w1.finite()) throw NumericalError("transport_step: NaN detected");
  return TransportState{st.t + dt, eps, std::move(w1)};
}

TransportState TransportTrajectory::at(double t) const {
  if (times.empty())
    throw std::invalid_argument("TransportTrajectory::at: empty");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  std::size_t hi = 1;
  while (times[hi] < t) ++hi;
  const double t0 = times[hi - 1], t1 = times[hi];
  const double a = (t - t0) / (t1 - t0);
  TransportState out = states[hi - 1];
  out.t = t;
  out.w = (1.0 - a) * states[hi - 1].w + a * states[hi].w;
  return out;
}

TransportTrajectory solve_transport(const VectorField& w0, double eps,
                                    const SliceTrajectory& v_traj, double T,
                                    double dt, int sample_every) {
  if (w0.ncomp() != 3)
    throw std::invalid_argument("solve_transport: w0 must have 3 components");
  const int nsteps = steps_for(T, dt);
  if (sample_every < 1) sample_every = 1;
  const double t0 = v_traj.times.empty() ? 0.0 : v_traj.times.front();
  if (!v_traj.times.empty() && v_traj.t_end() + 1e-12 < t0 + T)
    throw std::invalid_argument("solve_transport: v trajectory too short");

  const GridPtr slow = w0.grid();
  TransportTrajectory traj;
  traj.s_values = {-0.5, 0.0, 0.5};

  TransportState st{t0, eps, w0};
  std::vector<double> diss(traj.s_values.size(), 0.0);
  std::vector<double> d_prev(traj.s_values.size());
  auto grad_sq = [&](const VectorField& w, double s) {
    const double n = hs_norm(w, s + 1.0, NormAxes::horizontal);
    return n * n;
  };
  for (std::size_t j = 0; j < traj.s_values.size(); ++j)
    d_prev[j] = grad_sq(st.w, traj.s_values[j]);

  auto record = [&](const TransportState& s) {
    traj.times.push_back(s.t);
    traj.states.push_back(s);
    std::vector<double> ns, ds;
    for (std::size_t j = 0; j < traj.s_values.size(); ++j) {
      const double n = hs_norm(s.w, traj.s_values[j], NormAxes::horizontal);
      ns.push_back(n * n);
      ds.push_back(diss[j]);
    }
    traj.norm_sq.push_back(std::move(ns));
    traj.diss_integral.push_back(std::move(ds));
  };

  record(st);
  VectorField v_here = slices_to_slow(v_traj.at(t0), slow);
  for (int k = 0; k < nsteps; ++k) {
    const double t_next = t0 + (k + 1) * dt;
    VectorField v_next = slices_to_slow(v_traj.at(t_next), slow);
    st = transport_step(st, v_here, v_next, dt);
    st.t = t_next;  // avoid accumulated t roundoff
    for (std::size_t j = 0; j < traj.s_values.size(); ++j) {
      const double d_next = grad_sq(st.w, traj.s_values[j]);
      diss[j] += 0.5 * dt * (d_prev[j] + d_next);
      d_prev[j] = d_next;
    }
    if ((k + 1) % sample_every == 0 || k + 1 == nsteps) record(st);
    v_here = std::move(v_next);
  }
  return traj;
}

}  // namespace slowflow
