#pragma once

#include <string>

#include "slowflow/assembler.hpp"
#include "slowflow/rng.hpp"

namespace slowflow {

// Randomized inequality audits on band-limited samples. Every kind reports
// the empirical max of the left/right-hand ratio over the sample set:
//   gn              |b|^2_Linf vs ||b||_{H^1/2_h} ||grad_h b||_{H^1/2_h} (2D)
//   aniso_interp    ||a(x_h, eps x3)||^2_{H^1/2} vs
//                   eps^{-1}||a|| ||grad_h a|| + ||a|| ||d3 a||  (ratio <= 1)
//   product_sobolev ||f g||_{L2} vs ||f||_{H^1/2} ||g||_{H^1/2} (2D)
//   trilinear       (a.grad b | b)_{Hs} vs ||grad a||_{H^{d/2-1}}
//                   ||b||_{Hs} ||grad b||_{Hs}, div a = 0
//   advection       |(a.grad b|b)_{H1/2}| + |(b.grad a|b)_{H1/2}| vs
//                   (||a||_Linf + ||grad a||_{LinfV L2h}) ||b|| ||grad b||
enum class AuditKind { gn, aniso_interp, product_sobolev, trilinear, advection };

AuditKind audit_kind_from_string(const std::string& s);
std::string to_string(AuditKind k);

struct AuditOptions {
  int samples = 1000;
  std::uint64_t seed = 1;
  int kmax = 0;      // band limit; 0 picks n/8
  double s = 0.5;    // regularity index for trilinear
  int m = 4;         // 1/eps for aniso_interp
  int n3_fast = 0;   // fast vertical size for aniso_interp; 0 picks a default
};

struct AuditReport {
  std::string kind;
  int samples = 0;
  int skipped = 0;    // degenerate (0/0) samples
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  std::string resolution;
};

AuditReport inequality_audit(AuditKind kind, const GridPtr& grid,
                             const AuditOptions& opt = {});

}  // namespace slowflow
