#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slowflow/field.hpp"

namespace slowflow {

enum class NormAxes { full, horizontal };

// Homogeneous Sobolev norm (vol * sum |k|^{2s} |c(k)|^2)^{1/2} over nonzero
// modes; s = 0 is the plain Plancherel L2 norm (mean mode included).
// In horizontal mode the multiplier is |k_h|^s and the k_h = 0 plane-mean
// column carries no content for s != 0 (homogeneous sum over k_h != 0).
// A field with a nonzero mean mode is rejected for s < 0 in full mode.
double hs_norm(const ScalarField& f, double s, NormAxes axes = NormAxes::full);
double hs_norm(const VectorField& f, double s, NormAxes axes = NormAxes::full);

// Plancherel L2 norm and collocation-grid sup norm (vector: pointwise
// Euclidean magnitude). oversample = true evaluates the max on a 2x
// zero-padded grid instead of the collocation points.
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& f);
double linf_norm(const ScalarField& f, bool oversample = false);
double linf_norm(const VectorField& f, bool oversample = false);

struct AnisoNorms {
  double l2v_hsh;    // L2 in x3 of the horizontal Hs norm
  double linfv_l2h;  // max over vertical planes of the horizontal L2 norm
  double linfv_hsh;  // max over vertical planes of the horizontal Hs norm
};
AnisoNorms aniso_norms(const ScalarField& f, double s);
AnisoNorms aniso_norms(const VectorField& f, double s);

// Per-plane horizontal norms (the L^inf_v building block), one value per i3.
std::vector<double> planewise_hsh(const ScalarField& f, double s);
std::vector<double> planewise_hsh(const VectorField& f, double s);

// Hs inner product (u|v)_{Hs} = vol * sum |k|^{2s} Re(u . conj(v)).
double hs_inner(const VectorField& u, const VectorField& v, double s);
double hs_inner(const ScalarField& u, const ScalarField& v, double s);

struct BesovOptions {
  double t_min = 1e-4;
  double t_max = 1e2;
  int points = 64;          // log-spaced samples of t
  bool refine = true;       // golden-section pass around the discrete argmax
  int refine_iters = 40;
  bool oversample = false;  // 2x-refined grid for the inner sup norm
};

struct BesovResult {
  double value;   // sup_t sqrt(t) * Linf of the heat flow
  double t_star;  // discrete argmax
};

// Heat characterization of the B^{-1}_{inf,inf} norm on the torus:
// discrete sup over the t grid of t^{1/2} max_x |e^{t Lap} f|, with
// bracketing refinement. Requires a mean-free field and a nonempty grid.
BesovResult besov_heat_norm(const ScalarField& f, const BesovOptions& opt = {});
BesovResult besov_heat_norm(const VectorField& f, const BesovOptions& opt = {});

struct CarlesonOptions {
  std::vector<double> radii;  // empty: dyadic ladder L_min/2^j, j = 1..4
  int center_stride = 4;      // centers on every stride-th grid point
  int time_nodes = 16;        // trapezoid nodes on [0, R^2]
};

// Parabolic-cylinder term of the BMO^{-1} norm: discrete sup over centers x
// and radii R of R^{-d} int_0^{R^2} int_{B(x,R)} |e^{t Lap} f|^2 dy dt
// (d = number of active axes). A lower bound for the true sup by design.
double carleson_term(const ScalarField& f, const CarlesonOptions& opt = {});
double carleson_term(const VectorField& f, const CarlesonOptions& opt = {});

// Named norm value with its evaluation parameters (NDJSON-serializable).
struct NormRecord {
  std::string name;
  double value = 0.0;
  std::map<std::string, double> params;
};

}  // namespace slowflow
