#pragma once

#include "slowflow/assembler.hpp"

namespace slowflow {

// Leray-projected 3D Navier-Stokes nonlinearity -(u . grad u), divergence
// form (div u = 0 spectrally, so it equals the convective form mode-wise).
VectorField ns3d_rhs(const VectorField& u);

// Integrating-factor Heun step of 3D NS on the fast grid.
VectorField ns3d_step(const VectorField& u, double dt, StepInfo* info = nullptr);

// Remainder system right-hand side (diffusion excluded, handled by the
// stepper): P(-F - R.grad R - v_app.grad R - R.grad v_app); the projection
// absorbs the pressure gradient. F is the residual forcing of v_app
// (forcing_feps), which enters the remainder equation negated.
VectorField remainder_rhs(const VectorField& R, const VectorField& v_app,
                          const VectorField& F);

// Truncated physical representation of the background, reusable across the
// two Heun stages and across adjacent steps.
struct BackgroundPhys {
  std::array<std::vector<double>, 3> p;
};
void fill_background(const VectorField& v_app, BackgroundPhys& out);

// Heun step of the remainder system with the background and forcing
// evaluated at the start and end of the step.
VectorField remainder_step(const VectorField& R, const VectorField& vapp_t,
                           const VectorField& F_t, const VectorField& vapp_tdt,
                           const VectorField& F_tdt, double dt);
VectorField remainder_step(const VectorField& R, const BackgroundPhys& vp_t,
                           const VectorField& F_t,
                           const BackgroundPhys& vp_tdt,
                           const VectorField& F_tdt, double dt);

// V_eps(t) = ||v_app||^2_Linf + ||grad v_app||^2_{LinfV L2h}.
double veps_value(const VectorField& v_app);

// max over planes of the horizontal L2 norm of the full gradient tensor.
double grad_linfv_l2h(const VectorField& f);

struct WeightSeries {
  double lambda = 1.0;
  std::vector<double> times;
  std::vector<double> veps;      // V_eps at sample times
  std::vector<double> integral;  // I(t) = int_0^t V_eps (trapezoid)

  // exp(-lambda I(t)) at sample index i.
  double weight(std::size_t i) const;
};

// Builds the cumulative weight series from sampled V_eps values.
WeightSeries weight_Veps(const std::vector<double>& times,
                         const std::vector<double>& veps_samples,
                         double lambda);

}  // namespace slowflow
