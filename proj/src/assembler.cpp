#include "slowflow/assembler.hpp"

#include <cmath>
#include <stdexcept>

#include "slowflow/norms.hpp"
#include "slowflow/spectral.hpp"

namespace slowflow {

namespace {

// p0 on the whole slow grid at once: the horizontal inversion is diagonal in
// k3, and physical-space products act per vertical plane, so this equals the
// per-slice pressure_p0 stacked.
ScalarField pressure_p0_slow(const VectorField& v_slow) {
  const Grid& g = v_slow.g();
  ScalarField rhs(v_slow.grid(), true);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      const ScalarField prod = multiply_dealiased(
          v_slow[j], v_slow[k], DealiasMode::horizontal_only);
      for (int i1 = 0; i1 < g.n1(); ++i1)
        for (int i2 = 0; i2 < g.n2(); ++i2) {
          const double kj = j == 0 ? g.k1(i1) : g.k2(i2);
          const double kk = k == 0 ? g.k1(i1) : g.k2(i2);
          const cplx scale{-kj * kk, 0.0};
          for (int i3 = 0; i3 < g.n3(); ++i3) {
            const std::size_t idx = g.index(i1, i2, i3);
            rhs[idx] += scale * prod[idx];
          }
        }
    }
  ScalarField p(v_slow.grid(), true);
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2) {
      const double kh2 = g.k1(i1) * g.k1(i1) + g.k2(i2) * g.k2(i2);
      if (kh2 == 0.0) continue;
      for (int i3 = 0; i3 < g.n3(); ++i3) {
        const std::size_t idx = g.index(i1, i2, i3);
        p[idx] = rhs[idx] / kh2;
      }
    }
  return p;
}

}  // namespace

EpsParams make_eps_params(const GridPtr& slow, int n3_fast, int m, double T,
                          double dt) {
  if (!slow || slow->is2d())
    throw std::invalid_argument("make_eps_params: slow grid must be 3D");
  if (m < 1) throw std::invalid_argument("make_eps_params: m must be >= 1");
  if (n3_fast % m != 0)
    throw std::invalid_argument("make_eps_params: m must divide n3_fast");
  if (n3_fast < slow->n3())
    throw std::invalid_argument("make_eps_params: n3_fast < n3_slow");
  EpsParams ep;
  ep.eps = 1.0 / m;
  ep.m = m;
  ep.slow = slow;
  ep.fast = make_grid(slow->n1(), slow->n2(), n3_fast, slow->L1(), slow->L2(),
                      m * slow->L3());
  ep.T = T;
  ep.dt = dt;
  return ep;
}

ScalarField slow_to_fast(const ScalarField& f, const EpsParams& ep) {
  const Grid& s = f.g();
  const Grid& d = *ep.fast;
  if (!s.same_shape(*ep.slow))
    throw std::invalid_argument("slow_to_fast: field not on the slow grid");
  ScalarField out(ep.fast, f.zero_mean());
  for (int i1 = 0; i1 < s.n1(); ++i1)
    for (int i2 = 0; i2 < s.n2(); ++i2)
      for (int i3 = 0; i3 < s.n3(); ++i3) {
        const int mode = Grid::signed_mode(i3, s.n3());
        const int j3 = mode >= 0 ? mode : mode + d.n3();
        out.at(i1, i2, j3) = f.at(i1, i2, i3);
      }
  return out;
}

VectorField slow_to_fast(const VectorField& f, const EpsParams& ep) {
  std::vector<ScalarField> comps;
  comps.reserve(f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c) comps.push_back(slow_to_fast(f[c], ep));
  return VectorField(std::move(comps));
}

VectorField build_u0_eps(const SliceState& v0, const VectorField& w0_slow,
                         const EpsParams& ep) {
  if (w0_slow.ncomp() != 3)
    throw std::invalid_argument("build_u0_eps: w0 must have 3 components");
  if (slice_divergence_defect(v0) > 1e-8)
    throw std::invalid_argument("build_u0_eps: v0 slice not divergence-free");
  if (divergence_defect(w0_slow) > 1e-8)
    throw std::invalid_argument("build_u0_eps: w0 not divergence-free");

  const VectorField v_slow = slices_to_slow(v0, ep.slow);
  std::vector<ScalarField> comps{v_slow[0] + ep.eps * ScalarField(w0_slow[0]),
                                 v_slow[1] + ep.eps * ScalarField(w0_slow[1]),
                                 w0_slow[2]};
  return slow_to_fast(VectorField(std::move(comps)), ep);
}

ApproxSolution build_vapp(const VectorField& v_slow, const VectorField& w,
                          const EpsParams& ep) {
  if (v_slow.ncomp() != 2 || w.ncomp() != 3)
    throw std::invalid_argument("build_vapp: need 2-component v, 3-component w");
  const double eps = ep.eps;
  std::vector<ScalarField> comps{v_slow[0] + eps * ScalarField(w[0]),
                                 v_slow[1] + eps * ScalarField(w[1]), w[2]};
  ApproxSolution out{slow_to_fast(VectorField(std::move(comps)), ep), {}};
  ScalarField p_slow = pressure_p0_slow(v_slow);
  p_slow += eps * pressure_p1(v_slow, w, eps);
  out.p = slow_to_fast(p_slow, ep);
  return out;
}

ApproxSolution build_vapp(const SliceTrajectory& v_traj,
                          const TransportTrajectory& w_traj,
                          const EpsParams& ep, double t) {
  if (t < v_traj.times.front() - 1e-12 || t > v_traj.t_end() + 1e-12 ||
      t < w_traj.times.front() - 1e-12 || t > w_traj.times.back() + 1e-12)
    throw std::invalid_argument("build_vapp: t outside trajectories");
  const VectorField v_slow = slices_to_slow(v_traj.at(t), ep.slow);
  return build_vapp(v_slow, w_traj.at(t).w, ep);
}

ForcingBundle forcing_feps(const VectorField& v_slow, const VectorField& w,
                           const EpsParams& ep) {
  const double eps = ep.eps;
  const GridPtr& slow = ep.slow;
  const std::size_t n = slow->size();
  constexpr auto kH = DealiasMode::horizontal_only;

  // shared physical representations of w and v
  std::array<std::vector<double>, 3> wp;
  for (int c = 0; c < 3; ++c) detail::physical_masked(w[c], kH, wp[c]);
  std::array<std::vector<double>, 2> vp;
  for (int c = 0; c < 2; ++c) detail::physical_masked(v_slow[c], kH, vp[c]);

  // pressure part: eps (0, 0, d3 p0) with p0 from the three distinct v v
  // products
  VectorField press_slow(slow, 3);
  {
    const Grid& g = *slow;
    std::vector<double> prod(n);
    ScalarField rhs(slow, true);
    for (int j = 0; j < 2; ++j)
      for (int k = j; k < 2; ++k) {
        for (std::size_t q = 0; q < n; ++q) prod[q] = vp[j][q] * vp[k][q];
        const ScalarField pr = detail::forward_masked(slow, prod, kH);
        const double sym = j == k ? 1.0 : 2.0;
        for (int i1 = 0; i1 < g.n1(); ++i1)
          for (int i2 = 0; i2 < g.n2(); ++i2) {
            const double kj = j == 0 ? g.k1(i1) : g.k2(i2);
            const double kk = k == 0 ? g.k1(i1) : g.k2(i2);
            const cplx scale{-sym * kj * kk, 0.0};
            const std::size_t base = g.index(i1, i2, 0);
            for (int i3 = 0; i3 < g.n3(); ++i3)
              rhs[base + i3] += scale * pr[base + i3];
          }
      }
    ScalarField p0(slow, true);
    for (int i1 = 0; i1 < g.n1(); ++i1)
      for (int i2 = 0; i2 < g.n2(); ++i2) {
        const double kh2 = g.k1(i1) * g.k1(i1) + g.k2(i2) * g.k2(i2);
        if (kh2 == 0.0) continue;
        const std::size_t base = g.index(i1, i2, 0);
        for (int i3 = 0; i3 < g.n3(); ++i3) p0[base + i3] = rhs[base + i3] / kh2;
      }
    press_slow[2] = eps * derivative(p0, 3);
  }

  // linear part: -eps^2 (d3^2 v^h, 0). The minus is forced by the residual
  // identity: -Lap acting on v(x_h, eps x3) contributes -eps^2 d3^2 v and
  // neither the slice nor the transport equation cancels it.
  VectorField lin_slow(slow, 3);
  for (int c = 0; c < 2; ++c)
    lin_slow[c] = (-eps * eps) * derivative(derivative(v_slow[c], 3), 3);

  // nonlinear part: eps [ (eps w.grad w^h, w.grad w^3) + (w.grad v^h, 0) ];
  // convective form, physical w reused across both advections
  auto convect_with = [&](const auto& u_phys, const ScalarField& b) {
    std::vector<double> acc(n, 0.0), db;
    for (std::size_t j = 0; j < u_phys.size(); ++j) {
      detail::physical_masked_derivative(b, int(j) + 1, kH, db);
      for (std::size_t q = 0; q < n; ++q) acc[q] += u_phys[j][q] * db[q];
    }
    return detail::forward_masked(slow, acc, kH);
  };
  std::vector<ScalarField> wgw_c, wgv_c;
  for (int i = 0; i < 3; ++i) wgw_c.push_back(convect_with(wp, w[i]));
  for (int i = 0; i < 2; ++i) wgv_c.push_back(convect_with(wp, v_slow[i]));
  VectorField wgw(std::move(wgw_c));
  VectorField wgv(std::move(wgv_c));
  VectorField nonlin_slow(slow, 3);
  nonlin_slow[0] = eps * (eps * wgw[0] + wgv[0]);
  nonlin_slow[1] = eps * (eps * wgw[1] + wgv[1]);
  nonlin_slow[2] = eps * wgw[2];

  // All parts are mean-free analytically (derivatives, or products whose
  // mean is a divergence integral); kill the roundoff mean so negative-order
  // norms stay well-defined.
  press_slow.enforce_zero_mean();
  lin_slow.enforce_zero_mean();
  nonlin_slow.enforce_zero_mean();

  ForcingBundle out;
  out.pressure = slow_to_fast(press_slow, ep);
  out.linear = slow_to_fast(lin_slow, ep);
  out.nonlinear = slow_to_fast(nonlin_slow, ep);
  out.total = out.pressure + out.linear;
  out.total += out.nonlinear;
  return out;
}

ForcingBundle forcing_feps(const SliceTrajectory& v_traj,
                           const TransportTrajectory& w_traj,
                           const EpsParams& ep, double t) {
  const VectorField v_slow = slices_to_slow(v_traj.at(t), ep.slow);
  return forcing_feps(v_slow, w_traj.at(t).w, ep);
}

double residual_check(const SliceTrajectory& v_traj,
                      const TransportTrajectory& w_traj, const EpsParams& ep,
                      double t, double dt_fd) {
  if (dt_fd <= 0.0)
    throw std::invalid_argument("residual_check: dt_fd must be > 0");
  const double t0 = v_traj.times.front();
  if (t < t0 - 1e-12 || t + dt_fd > v_traj.t_end() + 1e-12)
    throw std::invalid_argument("residual_check: t + dt_fd outside trajectory");
  // one-sided (first-order) difference at the left boundary
  const bool one_sided = t - dt_fd < t0 - 1e-12;

  const ApproxSolution va = build_vapp(v_traj, w_traj, ep, t);
  const ApproxSolution vp = build_vapp(v_traj, w_traj, ep, t + dt_fd);
  const ApproxSolution vm =
      one_sided ? va : build_vapp(v_traj, w_traj, ep, t - dt_fd);
  const ForcingBundle F = forcing_feps(v_traj, w_traj, ep, t);

  VectorField defect = (one_sided ? 1.0 / dt_fd : 0.5 / dt_fd) * (vp.v - vm.v);
  defect += convect(va.v, va.v, {1, 2, 3});
  // - Lap v_app, spectral
  const Grid& g = *ep.fast;
  VectorField lap = va.v;
  for (int c = 0; c < 3; ++c)
    for (int i1 = 0; i1 < g.n1(); ++i1)
      for (int i2 = 0; i2 < g.n2(); ++i2)
        for (int i3 = 0; i3 < g.n3(); ++i3) {
          const double k2 = g.k1(i1) * g.k1(i1) + g.k2(i2) * g.k2(i2) +
                            g.k3(i3) * g.k3(i3);
          lap[c].at(i1, i2, i3) *= -k2;
        }
  defect -= lap;
  for (int c = 0; c < 3; ++c) defect[c] += derivative(va.p, c + 1);
  defect -= F.total;

  const double fn = l2_norm(F.total);
  const double dn = l2_norm(defect);
  return fn > 1e-14 ? dn / fn : dn;
}

}  // namespace slowflow
