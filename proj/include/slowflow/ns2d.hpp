#pragma once

#include <vector>

#include "slowflow/field.hpp"

namespace slowflow {

// Advisory CFL / health info returned by single steps.
struct StepInfo {
  double cfl = 0.0;        // dt * max|v| * max|k|
  bool cfl_warning = false;
};

// Stack of horizontal velocity fields indexed by the slow vertical
// coordinate y3 (one independent 2D flow per slice).
struct SliceState {
  double t = 0.0;
  GridPtr hgrid;               // shared horizontal (2D) grid
  std::vector<double> y3;      // slow collocation coordinates, one per slice
  std::vector<VectorField> v;  // 2-component velocity per slice

  int count() const { return int(v.size()); }
};

struct SliceTrajectory {
  std::vector<double> times;
  std::vector<SliceState> states;
  // dissipation[i][s] = int_0^{t_i} || grad_h v_s ||^2_{L2h} dt' (trapezoid)
  std::vector<std::vector<double>> dissipation;

  double t_end() const { return times.empty() ? 0.0 : times.back(); }
  // Linear interpolation of spectral coefficients between samples.
  SliceState at(double t) const;
};

// p0 = (-Lap_h)^{-1} sum_{j,k} d_j d_k (v^j v^k), zero mean.
ScalarField pressure_p0(const VectorField& v);

// Leray-projected -(v . grad_h v); diffusion is handled by the stepper's
// integrating factor.
VectorField ns2d_rhs(const VectorField& v);

// One integrating-factor Heun step of the 2D Navier-Stokes slice.
VectorField ns2d_step(const VectorField& v, double dt, StepInfo* info = nullptr);

// Independent per-slice integration to time T (T must be an integer number
// of steps); states sampled every sample_every steps plus the endpoint.
SliceTrajectory solve_slice_family(const SliceState& v0, double T, double dt,
                                   int sample_every = 1, int threads = 1);

struct EnergyRecord {
  int slice;
  double y3;
  double t;
  double energy;       // ||v(t)||^2_{L2h}
  double dissipation;  // int_0^t ||grad_h v||^2_{L2h}
  double defect;       // |E + 2 D - E0| / E0
};

// Per-slice, per-sample defect of the 2D energy identity
// ||v(t)||^2 + 2 int_0^t ||grad_h v||^2 = ||v0||^2.
std::vector<EnergyRecord> energy_report(const SliceTrajectory& traj);

// ||grad_h v||^2_{L2} of a slice (the dissipation density).
double grad_h_sq(const VectorField& v);

// Worst per-slice divergence relative to the whole family's magnitude
// (a slice that is numerically zero cannot fail the check on noise alone).
double slice_divergence_defect(const SliceState& s);

int steps_for(double T, double dt);

}  // namespace slowflow
