#pragma once

#include <array>

#include "slowflow/field.hpp"

namespace slowflow {

// Physical <-> spectral transforms (FFTW behind the scenes).
// from_physical applies the 1/N normalization; the pair is an exact inverse
// up to roundoff (round-trip relative error < 1e-12 on any input).
std::vector<double> to_physical(const ScalarField& f);
ScalarField from_physical(const GridPtr& grid, std::span<const double> values);

// Complex-valued variants used internally and by tests probing symmetry.
std::vector<cplx> to_physical_complex(const ScalarField& f);

// d/dx_axis: mode-wise multiplication by i*k_axis. The (self-conjugate)
// Nyquist mode is annihilated so real fields stay real. axis in {1,2,3};
// throws on an inactive axis.
ScalarField derivative(const ScalarField& f, int axis);
VectorField derivative(const VectorField& f, int axis);

// Exact heat semigroup: multiplier exp(-t * sum_j w_j k_j^2).
// weights (1,1,1) is e^{t Laplacian}; (1,1,eps^2) the anisotropic operator.
ScalarField heat_propagate(const ScalarField& f, double t,
                           std::array<double, 3> weights = {1.0, 1.0, 1.0});
VectorField heat_propagate(const VectorField& f, double t,
                           std::array<double, 3> weights = {1.0, 1.0, 1.0});
void heat_propagate_inplace(ScalarField& f, double t,
                            std::array<double, 3> weights = {1.0, 1.0, 1.0});
void heat_propagate_inplace(VectorField& f, double t,
                            std::array<double, 3> weights = {1.0, 1.0, 1.0});

// Leray projection in the metric (1,1,m): returns u - (d1 p, d2 p, m d3 p)
// with p = (Lap_h + m d3^2)^{-1} div u, which annihilates the standard
// divergence mode-wise and is idempotent. m = 1 is the classical projector;
// 2-component fields project with the horizontal Laplacian only.
VectorField weighted_leray_project(const VectorField& u, double m = 1.0);

// Unweighted divergence sum_j d_j u_j (or with per-axis weights).
ScalarField divergence(const VectorField& u,
                       std::array<double, 3> weights = {1.0, 1.0, 1.0});

// max_k |sum_j i w_j k_j c_j(k)| / max_k |c(k)|, the solenoidality defect.
double divergence_defect(const VectorField& u,
                         std::array<double, 3> weights = {1.0, 1.0, 1.0});

// horizontal_only leaves the vertical spectrum alone: slow-grid products are
// pointwise in y3 (one independent 2D interaction per plane), so only the
// horizontal axes need the 2/3 rule there.
enum class DealiasMode { all_axes, horizontal_only };

// 2/3-rule truncation: zero every mode with 3|m_j| >= n_j on the selected axes.
ScalarField dealias(const ScalarField& f,
                    DealiasMode mode = DealiasMode::all_axes);
VectorField dealias(const VectorField& f,
                    DealiasMode mode = DealiasMode::all_axes);

// Pointwise product of the 2/3-truncated inputs, re-truncated: bilinear,
// commutative, alias-free for quadratic interactions.
ScalarField multiply_dealiased(const ScalarField& a, const ScalarField& b,
                               DealiasMode mode = DealiasMode::all_axes);

// Convective advection (u . grad) b over the given axes (dealiased products).
VectorField convect(const VectorField& u, const VectorField& b,
                    std::array<int, 3> axes = {1, 2, 3},
                    DealiasMode mode = DealiasMode::all_axes);

// Divergence-form advection sum_j d_j (b_i u_j); identical to convect for
// spectrally solenoidal u.
VectorField advect_div(const VectorField& u, const VectorField& b,
                       DealiasMode mode = DealiasMode::all_axes);

// Conjugate-symmetry defect max |c(k) - conj(c(-k))| / max |c| (reality check).
double conjugate_symmetry_defect(const ScalarField& f);

namespace detail {

// Fused kernels for the solver hot paths: truncated field to physical values,
// and physical product back to a truncated spectral field, on shared scratch.
void physical_masked(const ScalarField& f, DealiasMode mode,
                     std::vector<double>& out);
ScalarField forward_masked(const GridPtr& grid, std::span<const double> product,
                           DealiasMode mode);
// forward_masked of the pointwise product a*b (multiply fused into the pack)
ScalarField forward_masked_product(const GridPtr& grid,
                                   std::span<const double> a,
                                   std::span<const double> b,
                                   DealiasMode mode);
// physical values of the truncated derivative d_axis f (one pass, no temps)
void physical_masked_derivative(const ScalarField& f, int axis,
                                DealiasMode mode, std::vector<double>& out);
// acc += d_axis f without materializing the derivative
void add_derivative(ScalarField& acc, const ScalarField& f, int axis);

}  // namespace detail

}  // namespace slowflow
