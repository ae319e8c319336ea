#include "slowflow/audit.hpp"

#include <cmath>
#include <stdexcept>

#include "slowflow/norms.hpp"
#include "slowflow/remainder.hpp"
#include "slowflow/spectral.hpp"

namespace slowflow {

namespace {

std::string resolution_string(const Grid& g) {
  std::string s = std::to_string(g.n1()) + "x" + std::to_string(g.n2());
  if (!g.is2d()) s += "x" + std::to_string(g.n3());
  return s;
}

int default_kmax(const Grid& g, int requested) {
  if (requested > 0) return requested;
  int n = std::min(g.n1(), g.n2());
  if (!g.is2d()) n = std::min(n, g.n3());
  return std::max(1, n / 8);
}

struct Ratio {
  double num = 0.0, den = 0.0;
};

}  // namespace

AuditKind audit_kind_from_string(const std::string& s) {
  if (s == "gn") return AuditKind::gn;
  if (s == "aniso-interp" || s == "aniso_interp") return AuditKind::aniso_interp;
  if (s == "product-sobolev" || s == "product_sobolev")
    return AuditKind::product_sobolev;
  if (s == "trilinear") return AuditKind::trilinear;
  if (s == "advection") return AuditKind::advection;
  throw std::invalid_argument("unknown audit kind: " + s);
}

std::string to_string(AuditKind k) {
  switch (k) {
    case AuditKind::gn: return "gn";
    case AuditKind::aniso_interp: return "aniso-interp";
    case AuditKind::product_sobolev: return "product-sobolev";
    case AuditKind::trilinear: return "trilinear";
    case AuditKind::advection: return "advection";
  }
  return "?";
}

AuditReport inequality_audit(AuditKind kind, const GridPtr& grid,
                             const AuditOptions& opt) {
  const Grid& g = *grid;
  const int kmax = default_kmax(g, opt.kmax);

  // aniso_interp needs the fast-grid geometry for the substitution norm.
  EpsParams ep;
  if (kind == AuditKind::aniso_interp) {
    if (g.is2d())
      throw std::invalid_argument("aniso-interp audit needs a 3D grid");
    int n3f = opt.n3_fast;
    if (n3f == 0) {
      n3f = g.n3();
      while (n3f % opt.m != 0 || n3f < g.n3()) n3f *= 2;
    }
    ep = make_eps_params(grid, n3f, opt.m, 1.0, 1e-2);
  }

  AuditReport rep;
  rep.kind = to_string(kind);
  rep.resolution = resolution_string(g);
  double sum_ratio = 0.0;
  int used = 0;

  for (int i = 0; i < opt.samples; ++i) {
    // fixed seed-per-sample scheme: reproducible regardless of scheduling
    Rng rng(opt.seed * 1000003ULL + std::uint64_t(i));
    Ratio r;

    switch (kind) {
      case AuditKind::gn: {
        if (!g.is2d())
          throw std::invalid_argument("gn audit runs on 2D grids");
        const ScalarField b = random_scalar(grid, kmax, rng);
        const double lhs = std::pow(linf_norm(b), 2);
        r = {lhs, hs_norm(b, 0.5) * hs_norm(b, 1.5)};
        break;
      }
      case AuditKind::aniso_interp: {
        const ScalarField a = random_scalar(grid, kmax, rng);
        const ScalarField a_fast = slow_to_fast(a, ep);
        const double lhs = std::pow(hs_norm(a_fast, 0.5), 2);
        const double l2 = l2_norm(a);
        const double gh = hs_norm(a, 1.0, NormAxes::horizontal);
        const double d3 = l2_norm(derivative(a, 3));
        r = {lhs, ep.m * l2 * gh + l2 * d3};
        break;
      }
      case AuditKind::product_sobolev: {
        if (!g.is2d())
          throw std::invalid_argument("product-sobolev audit runs on 2D grids");
        const ScalarField f = random_scalar(grid, kmax, rng);
        const ScalarField h = random_scalar(grid, kmax, rng);
        r = {l2_norm(multiply_dealiased(f, h)),
             hs_norm(f, 0.5) * hs_norm(h, 0.5)};
        break;
      }
      case AuditKind::trilinear: {
        const int nc = g.is2d() ? 2 : 3;
        const double d = g.is2d() ? 2.0 : 3.0;
        const VectorField a = random_vector(grid, nc, kmax, rng, true);
        const VectorField b = random_vector(grid, nc, kmax, rng, false);
        std::array<int, 3> axes{1, 2, 3};
        const VectorField adv = convect(a, b, axes);
        const double num = std::abs(hs_inner(adv, b, opt.s));
        r = {num, hs_norm(a, d / 2.0) * hs_norm(b, opt.s) *
                      hs_norm(b, opt.s + 1.0)};
        break;
      }
      case AuditKind::advection: {
        if (g.is2d())
          throw std::invalid_argument("advection audit needs a 3D grid");
        const VectorField a = random_vector(grid, 3, kmax, rng, false);
        const VectorField b = random_vector(grid, 3, kmax, rng, false);
        const double num = std::abs(hs_inner(convect(a, b), b, 0.5)) +
                           std::abs(hs_inner(convect(b, a), b, 0.5));
        const double lead = linf_norm(a) + grad_linfv_l2h(a);
        r = {num, lead * hs_norm(b, 0.5) * hs_norm(b, 1.5)};
        break;
      }
    }

    if (r.den < 1e-30) {
      ++rep.skipped;
      continue;
    }
    const double ratio = r.num / r.den;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    sum_ratio += ratio;
    ++used;
  }
  rep.samples = used;
  rep.mean_ratio = used > 0 ? sum_ratio / used : 0.0;
  return rep;
}

}  // namespace slowflow
