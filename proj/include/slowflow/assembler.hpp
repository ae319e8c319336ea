#pragma once

#include "slowflow/transport.hpp"

namespace slowflow {

// Geometry bundle for one eps: the slow box (x_h, y3) and the fast box
// (x_h, x3) with L3_fast = m * L3_slow, so y3 = eps * x3 wraps exactly once
// around the slow box and the substitution is an exact spectral re-indexing.
struct EpsParams {
  double eps = 1.0;  // 1/m
  int m = 1;
  GridPtr slow;
  GridPtr fast;
  double T = 1.0;
  double dt = 2e-3;
};

// Validates m >= 1, m | n3_fast, n3_slow <= n3_fast; builds the fast grid.
EpsParams make_eps_params(const GridPtr& slow, int n3_fast, int m, double T,
                          double dt);

// Exact evaluation at (x_h, eps x3): slow vertical mode j keeps its index on
// the fast box of length m * L3_slow (its wavenumber scales by eps). Linear;
// ||out||^2_{L2(fast)} = m * ||in||^2_{L2(slow)} (substitution Jacobian).
ScalarField slow_to_fast(const ScalarField& f, const EpsParams& ep);
VectorField slow_to_fast(const VectorField& f, const EpsParams& ep);

// u0 = (v0^h + eps w0^h, w0^3)(x_h, eps x3); divergence-free by the chain
// rule when div_h v0 = 0 per slice and div w0 = 0.
VectorField build_u0_eps(const SliceState& v0, const VectorField& w0_slow,
                         const EpsParams& ep);

struct ApproxSolution {
  VectorField v;   // v_app on the fast grid
  ScalarField p;   // p_app = (p0 + eps p1)(x_h, eps x3)
};

// From instantaneous slow states.
ApproxSolution build_vapp(const VectorField& v_slow, const VectorField& w,
                          const EpsParams& ep);
// From stored trajectories at time t (linear interpolation between samples).
ApproxSolution build_vapp(const SliceTrajectory& v_traj,
                          const TransportTrajectory& w_traj,
                          const EpsParams& ep, double t);

// The three forcing contributions of F = eps G(t, x_h, eps x3), already
// rescaled to the fast grid: pressure eps (0, d3 p0), linear eps^2 (d3^2 v, 0),
// nonlinear eps Ftilde1; total is their sum mode-wise.
struct ForcingBundle {
  VectorField pressure;
  VectorField linear;
  VectorField nonlinear;
  VectorField total;
};

ForcingBundle forcing_feps(const VectorField& v_slow, const VectorField& w,
                           const EpsParams& ep);
ForcingBundle forcing_feps(const SliceTrajectory& v_traj,
                           const TransportTrajectory& w_traj,
                           const EpsParams& ep, double t);

// || d_t v_app + v_app . grad v_app - Lap v_app + grad p_app - F ||_{L2},
// the time derivative by central difference on the stored trajectories,
// normalized by ||F||_{L2} (absolute when F vanishes).
double residual_check(const SliceTrajectory& v_traj,
                      const TransportTrajectory& w_traj, const EpsParams& ep,
                      double t, double dt_fd);

}  // namespace slowflow
