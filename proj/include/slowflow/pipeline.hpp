#pragma once

#include "slowflow/remainder.hpp"

namespace slowflow {

struct PipelineOptions {
  bool direct_solve = false;   // also evolve u by ns3d_step for cross-checks
  int sample_every = 4;        // diagnostic cadence in steps
  double lambda = 1.0;         // weight parameter of the R_lambda diagnostics
  double ceiling_factor = 1e3; // blow-up ceiling vs the initial H^{1/2} size
};

// Time series and terminal states of one coupled slices -> transport ->
// assembly -> remainder run (one eps).
struct PipelineResult {
  std::vector<double> times;
  std::vector<double> r_h12;            // ||R(t)||_{H^{1/2}}
  std::vector<double> r_diss_integral;  // int_0^t ||grad R||^2_{H^{1/2}}
  std::vector<double> u_h12;            // direct solve (empty otherwise)
  std::vector<double> veps;             // V_eps at sample times
  std::vector<double> f_total_norm;     // ||F(t)||_{H^{-1/2}}

  // L^2-in-time H^{-1/2} norms of the forcing components over [0, T]
  double f_press_l2t = 0.0;
  double f_lin_l2t = 0.0;
  double f_nonlin_l2t = 0.0;
  double f_total_l2t = 0.0;

  double sup_r_h12 = 0.0;
  double terminal_r_h12 = 0.0;
  bool blowup = false;
  double blowup_time = -1.0;
  bool cfl_warned = false;

  VectorField R_final;
  VectorField u_final;     // direct solve only
  VectorField vapp_final;
  double cross_validation_l2 = -1.0;  // ||u - v_app - R||_{L2}(T), direct only
};

// Streaming run: slices, transport, assembly and the remainder (plus the
// direct u solve on request) advance in lockstep, one dt at a time, with no
// trajectory storage and no time interpolation.
PipelineResult run_pipeline(const SliceState& v0, const VectorField& w0_slow,
                            const EpsParams& ep, const PipelineOptions& opt);

// Trajectory-backed run of the remainder system alone: v and w are read
// (with linear interpolation) from stored trajectories. With cadence-1
// trajectories this reproduces run_pipeline's remainder exactly.
PipelineResult solve_remainder(const SliceTrajectory& v_traj,
                               const TransportTrajectory& w_traj,
                               const EpsParams& ep,
                               const PipelineOptions& opt);

// The v_app velocity alone (no pressure assembly), for the stepping loop.
VectorField build_vapp_velocity(const VectorField& v_slow,
                                const VectorField& w, const EpsParams& ep);

// One stacked integrating-factor Heun step of the whole slice family on the
// slow grid (horizontal operators only; equal to per-slice ns2d_step).
VectorField slice_stack_step(const VectorField& v_slow, double dt,
                             StepInfo* info = nullptr);

}  // namespace slowflow
