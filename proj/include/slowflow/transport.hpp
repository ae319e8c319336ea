#pragma once

#include <vector>

#include "slowflow/ns2d.hpp"

namespace slowflow {

// w on the slow 3D grid (x_h, y3), advected horizontally by the slice flow,
// diffused by Lap_h + eps^2 d3^2, kept solenoidal by the eps-weighted
// pressure gradient (grad_h p1, eps^2 d3 p1).
struct TransportState {
  double t = 0.0;
  double eps = 1.0;
  VectorField w;  // 3 components on the slow grid
};

// Stacks the slice family into a 2-component field on the slow grid
// (vertical transform across slices); slices must match the grid's
// collocation planes.
VectorField slices_to_slow(const SliceState& s, const GridPtr& slow_grid);

// Splits a slow-grid 2-component field back into per-plane slices.
SliceState slow_to_slices(const VectorField& v, double t);

// N^h = v . grad_h w^h + d3 (w^3 v), the horizontal source of the pressure;
// satisfies div_h N^h = div (v . grad_h w) when div_h v = 0 per plane.
VectorField nh_term(const VectorField& v_slow, const VectorField& w);

// p1 from -(eps^2 d3^2 + Lap_h) p1 = div_h N^h: spectral division by
// |k_h|^2 + eps^2 k3^2, zero mode mapped to zero.
ScalarField pressure_p1(const VectorField& v_slow, const VectorField& w,
                        double eps);

// Largest value of the pressure-inversion multiplier |k_h|^2 / (|k_h|^2 +
// eps^2 k3^2) over all nonzero modes (bounded by 1 for every eps > 0).
double pressure_multiplier_max(const Grid& slow, double eps);

// Integrating-factor Heun step with exact e^{dt (Lap_h + eps^2 d3^2)} and the
// eps-weighted Leray projection; v is the advecting slice field at the start
// and end of the step.
TransportState transport_step(const TransportState& st, const VectorField& v_t,
                              const VectorField& v_tdt, double dt,
                              StepInfo* info = nullptr);

struct TransportTrajectory {
  std::vector<double> times;
  std::vector<TransportState> states;
  std::vector<double> s_values;  // horizontal regularity indices reported
  // norm_sq[i][js] = ||w(t_i)||^2_{L2v Hs_h}; diss[i][js] the running
  // integral of ||grad_h w||^2_{L2v Hs_h}.
  std::vector<std::vector<double>> norm_sq;
  std::vector<std::vector<double>> diss_integral;

  TransportState at(double t) const;
};

// Advances w from w0 with the advecting field interpolated from v_traj;
// v_traj must cover [t0, t0 + T].
TransportTrajectory solve_transport(const VectorField& w0, double eps,
                                    const SliceTrajectory& v_traj, double T,
                                    double dt, int sample_every = 1);

}  // namespace slowflow
