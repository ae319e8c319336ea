#include <doctest.h>

#include <numbers>

#include "slowflow/assembler.hpp"
#include "slowflow/audit.hpp"
#include "slowflow/norms.hpp"
#include "slowflow/rng.hpp"
#include "slowflow/spectral.hpp"
#include "test_util.hpp"

using namespace slowflow;
using slowflow::testutil::sample;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// multiply coefficients by e^{i k . a} with a on the collocation lattice
ScalarField translate(const ScalarField& f, int j1, int j2, int j3) {
  const Grid& g = f.g();
  ScalarField out = f;
  const double a1 = g.coord(1, j1), a2 = g.coord(2, j2);
  const double a3 = g.is2d() ? 0.0 : g.coord(3, j3);
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2)
      for (int i3 = 0; i3 < g.n3(); ++i3)
        out.at(i1, i2, i3) *=
            std::exp(cplx{0.0, g.k1(i1) * a1 + g.k2(i2) * a2 + g.k3(i3) * a3});
  return out;
}
}  // namespace

TEST_SUITE_BEGIN("norms");

TEST_CASE("hs_norm closed forms and Plancherel") {
  auto g = make_grid(16, 16, kTwoPi, kTwoPi);
  const ScalarField c1 = sample(g, [](double x, double, double) {
    return std::cos(x);
  });
  const double l2 = l2_norm(c1);
  CHECK(l2 == doctest::Approx(std::sqrt(kTwoPi * kTwoPi / 2.0)));
  for (double s : {-0.5, 0.0, 0.5, 1.0, 2.0})
    CHECK(hs_norm(c1, s) == doctest::Approx(l2));

  const ScalarField c2 = sample(g, [](double x, double, double) {
    return std::cos(2.0 * x);
  });
  CHECK(hs_norm(c2, 1.0) == doctest::Approx(2.0 * l2_norm(c2)));

  Rng rng(31);
  ScalarField r = random_scalar(g, 5, rng);
  r[0] = cplx{0.3, 0.0};  // nonzero mean
  // Plancherel at s = 0 includes the mean
  const auto phys = to_physical(r);
  double sum = 0.0;
  for (double v : phys) sum += v * v;
  sum *= g->volume() / double(g->size());
  CHECK(hs_norm(r, 0.0) == doctest::Approx(std::sqrt(sum)));
  CHECK_THROWS_AS(hs_norm(r, -0.5), std::invalid_argument);
}

TEST_CASE("oversampled sup norm") {
  auto g = make_grid(16, 16, kTwoPi, kTwoPi);
  // a half-cell-shifted cosine peaks between collocation points
  ScalarField f(g);
  const double shift = 0.5 * kTwoPi / 16.0;
  f.at(1, 0, 0) = 0.5 * std::exp(cplx{0.0, -shift});
  f.at(15, 0, 0) = 0.5 * std::exp(cplx{0.0, shift});
  const double coarse = linf_norm(f);
  const double fine = linf_norm(f, true);
  CHECK(coarse < 1.0);          // grid max misses the peak
  CHECK(fine >= coarse);
  CHECK(fine == doctest::Approx(1.0).epsilon(1e-12));  // refined grid hits it

  // collocation-aligned data: both agree
  const ScalarField c = sample(g, [](double x, double, double) {
    return std::cos(x);
  });
  CHECK(linf_norm(c, true) == doctest::Approx(linf_norm(c)).epsilon(1e-12));
}

TEST_CASE("aniso_norms separable data") {
  auto g = make_grid(16, 16, 8, kTwoPi, kTwoPi, kTwoPi);
  const ScalarField f = sample(g, [](double x, double y, double z) {
    return std::sin(x) * std::cos(2.0 * y) * std::cos(z);
  });
  // ||f g||_{L2v Hs_h} = ||f||_{Hs_h} ||g||_{L2v}
  auto g2 = make_grid(16, 16, kTwoPi, kTwoPi);
  const ScalarField fh = sample(g2, [](double x, double y, double) {
    return std::sin(x) * std::cos(2.0 * y);
  });
  const double s = 0.5;
  const double expect = hs_norm(fh, s) * std::sqrt(kTwoPi / 2.0);
  CHECK(aniso_norms(f, s).l2v_hsh == doctest::Approx(expect));

  // x3-independent field: LinfV L2h equals the horizontal L2 norm
  const ScalarField flat = sample(g, [](double x, double y, double) {
    return std::sin(x) + 0.3 * std::cos(y);
  });
  const ScalarField flat2 = sample(g2, [](double x, double y, double) {
    return std::sin(x) + 0.3 * std::cos(y);
  });
  CHECK(aniso_norms(flat, 0.5).linfv_l2h == doctest::Approx(l2_norm(flat2)));
}

TEST_CASE("vertical Plancherel comparison: L2v Hs_h <= Hs for s > 0") {
  auto g = make_grid(16, 16, 16, kTwoPi, kTwoPi, kTwoPi);
  Rng rng(37);
  for (int i = 0; i < 50; ++i) {
    const ScalarField b = random_scalar(g, 5, rng);
    for (double s : {0.25, 0.5, 1.0}) {
      const double lhs = hs_norm(b, s, NormAxes::horizontal);
      const double rhs = hs_norm(b, s);
      CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("besov_heat_norm closed form for vertical cosines") {
  auto g = make_grid(8, 8, 32, kTwoPi, kTwoPi, kTwoPi);
  for (int k : {1, 2, 4}) {
    for (double A : {1.0, 2.5}) {
      const ScalarField f = sample(g, [k, A](double, double, double z) {
        return A * std::cos(k * z);
      });
      const BesovResult r = besov_heat_norm(f);
      const double expect = A / (k * std::sqrt(2.0 * std::numbers::e));
      CHECK(std::abs(r.value - expect) / expect < 5e-3);
      CHECK(r.t_star ==
            doctest::Approx(1.0 / (2.0 * k * k)).epsilon(0.05));
    }
  }
}

TEST_CASE("besov_heat_norm homogeneity, translation, refinement") {
  auto g = make_grid(16, 16, 8, kTwoPi, kTwoPi, kTwoPi);
  Rng rng(41);
  const ScalarField f = random_scalar(g, 3, rng);
  const double base = besov_heat_norm(f).value;
  CHECK(besov_heat_norm(3.0 * f).value ==
        doctest::Approx(3.0 * base).epsilon(1e-12));

  const ScalarField shifted = translate(f, 3, 7, 2);
  CHECK(besov_heat_norm(shifted).value ==
        doctest::Approx(base).epsilon(1e-12));

  // sup over a finer evaluation set never decreases
  BesovOptions coarse;
  coarse.points = 12;
  coarse.refine = false;
  BesovOptions fine;
  fine.points = 48;
  fine.refine = false;
  BesovOptions refined;
  refined.points = 48;
  const double vc = besov_heat_norm(f, coarse).value;
  const double vf = besov_heat_norm(f, fine).value;
  const double vr = besov_heat_norm(f, refined).value;
  CHECK(vc <= vf * (1.0 + 1e-15));
  CHECK(vf <= vr * (1.0 + 1e-15));

  ScalarField with_mean = f;
  with_mean[0] = cplx{1.0, 0.0};
  CHECK_THROWS_AS(besov_heat_norm(with_mean), std::invalid_argument);
  BesovOptions bad;
  bad.points = 1;
  CHECK_THROWS_AS(besov_heat_norm(f, bad), std::invalid_argument);
}

TEST_CASE("product lower bound for the heat-sup norm") {
  // h_eps = f(x_h) g(eps x3) stays at least a quarter of besov2d(f) max|g|.
  auto slow = make_grid(16, 16, 8, kTwoPi, kTwoPi, kTwoPi);
  auto g2 = make_grid(16, 16, kTwoPi, kTwoPi);
  const ScalarField f2 = sample(g2, [](double x, double y, double) {
    return std::cos(x) + 0.5 * std::cos(2.0 * x) * std::cos(y);
  });
  const double besov2d = besov_heat_norm(f2).value;
  for (int m : {8, 16, 32}) {
    EpsParams ep = make_eps_params(slow, 32, m, 1.0, 1e-2);
    const ScalarField h_slow = sample(slow, [](double x, double y, double z) {
      return (std::cos(x) + 0.5 * std::cos(2.0 * x) * std::cos(y)) *
             std::cos(z);
    });
    const ScalarField h = slow_to_fast(h_slow, ep);
    const double v = besov_heat_norm(h).value;
    CHECK(v >= 0.25 * besov2d * 1.0);
  }
}

TEST_CASE("carleson_term basics and brute-force oracle") {
  auto g = make_grid(16, 16, 8, kTwoPi, kTwoPi, kTwoPi);
  const ScalarField zero(g, true);
  CHECK(carleson_term(zero) == 0.0);

  const ScalarField c = sample(g, [](double x, double, double) {
    return std::cos(x);
  });
  CarlesonOptions opt;
  opt.radii = {1.0};
  opt.center_stride = 4;
  opt.time_nodes = 8;
  const double v1 = carleson_term(c, opt);
  const double v2 = carleson_term(2.0 * c, opt);
  CHECK(v2 == doctest::Approx(4.0 * v1).epsilon(1e-12));

  // direct Riemann/trapezoid evaluation, no FFT convolution
  const double R = 1.0;
  const Grid& gr = *g;
  const double cell = gr.volume() / double(gr.size());
  auto pdist = [](double x, double L) {
    const double y = std::fmod(std::abs(x), L);
    return std::min(y, L - y);
  };
  double brute = 0.0;
  const int nt = 8;
  const double dtq = R * R / nt;
  std::vector<std::vector<double>> heats;
  for (int it = 0; it <= nt; ++it)
    heats.push_back(to_physical(heat_propagate(c, dtq * it)));
  for (int c1 = 0; c1 < gr.n1(); c1 += 4)
    for (int c2 = 0; c2 < gr.n2(); c2 += 4)
      for (int c3 = 0; c3 < gr.n3(); c3 += 4) {
        double acc = 0.0;
        for (int it = 0; it <= nt; ++it) {
          double ball = 0.0;
          for (int i1 = 0; i1 < gr.n1(); ++i1)
            for (int i2 = 0; i2 < gr.n2(); ++i2)
              for (int i3 = 0; i3 < gr.n3(); ++i3) {
                const double d1 =
                    pdist(gr.coord(1, i1) - gr.coord(1, c1), gr.L1());
                const double d2 =
                    pdist(gr.coord(2, i2) - gr.coord(2, c2), gr.L2());
                const double d3 =
                    pdist(gr.coord(3, i3) - gr.coord(3, c3), gr.L3());
                if (d1 * d1 + d2 * d2 + d3 * d3 <= R * R) {
                  const double u = heats[it][gr.index(i1, i2, i3)];
                  ball += u * u * cell;
                }
              }
          acc += (it == 0 || it == nt ? 0.5 : 1.0) * dtq * ball;
        }
        brute = std::max(brute, acc / (R * R * R));
      }
  CHECK(v1 == doctest::Approx(brute).epsilon(1e-10));

  CarlesonOptions bad;
  bad.radii = {10.0};
  CHECK_THROWS_AS(carleson_term(c, bad), std::invalid_argument);
}

TEST_CASE("inequality audits") {
  auto g2 = make_grid(16, 16, kTwoPi, kTwoPi);
  AuditOptions opt;
  opt.samples = 40;
  opt.seed = 5;

  SUBCASE("gn closed form and random stability") {
    const ScalarField b = sample(g2, [](double x, double, double) {
      return std::cos(x);
    });
    const double lhs = std::pow(linf_norm(b), 2);
    const double rhs = hs_norm(b, 0.5) * hs_norm(b, 1.5);
    CHECK(lhs / rhs == doctest::Approx(1.0 / (2.0 * std::numbers::pi *
                                              std::numbers::pi)));
    const AuditReport rep = inequality_audit(AuditKind::gn, g2, opt);
    CHECK(rep.samples == 40);
    CHECK(rep.max_ratio > 0.0);
    CHECK(rep.max_ratio < 10.0);
  }

  SUBCASE("product-sobolev runs") {
    const AuditReport rep =
        inequality_audit(AuditKind::product_sobolev, g2, opt);
    CHECK(rep.samples == 40);
    CHECK(rep.max_ratio > 0.0);
  }

  SUBCASE("trilinear bounded over s, 10^3 samples") {
    // the advection trilinear bound audit: empirical max reported, bounded
    for (double s : {-0.5, 0.0, 0.5}) {
      AuditOptions o = opt;
      o.samples = 1000;
      o.s = s;
      const AuditReport rep = inequality_audit(AuditKind::trilinear, g2, o);
      CHECK(rep.samples == 1000);
      CHECK(rep.max_ratio > 0.0);
      CHECK(rep.max_ratio < 50.0);
    }
  }

  SUBCASE("audit maxima stable under doubling resolution at fixed band") {
    auto g32 = make_grid(32, 32, kTwoPi, kTwoPi);
    for (AuditKind kind : {AuditKind::gn, AuditKind::product_sobolev,
                           AuditKind::trilinear}) {
      AuditOptions o = opt;
      o.samples = 400;
      o.kmax = 2;  // same band on both grids
      const double m16 = inequality_audit(kind, g2, o).max_ratio;
      const double m32 = inequality_audit(kind, g32, o).max_ratio;
      CHECK(std::abs(m32 - m16) <= 0.10 * m16);
    }
  }

  SUBCASE("aniso-interp ratio never exceeds 1") {
    auto g3 = make_grid(16, 16, 8, kTwoPi, kTwoPi, kTwoPi);
    AuditOptions o = opt;
    o.m = 4;
    o.n3_fast = 16;
    const AuditReport rep = inequality_audit(AuditKind::aniso_interp, g3, o);
    CHECK(rep.samples == 40);
    CHECK(rep.max_ratio <= 1.0 + 1e-10);

    // single vertical mode: equality by hand
    const ScalarField a = testutil::sample(g3, [](double, double, double z) {
      return std::cos(z);
    });
    EpsParams ep = make_eps_params(g3, 16, 4, 1.0, 1e-2);
    const ScalarField af = slow_to_fast(a, ep);
    const double lhs = std::pow(hs_norm(af, 0.5), 2);
    const double rhs = 4.0 * l2_norm(a) * hs_norm(a, 1.0, NormAxes::horizontal) +
                       l2_norm(a) * l2_norm(derivative(a, 3));
    CHECK(lhs / rhs == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("advection audit runs on 3D") {
    auto g3 = make_grid(16, 16, 8, kTwoPi, kTwoPi, kTwoPi);
    AuditOptions o = opt;
    o.samples = 25;
    const AuditReport rep = inequality_audit(AuditKind::advection, g3, o);
    CHECK(rep.samples == 25);
    CHECK(rep.max_ratio > 0.0);
    CHECK(rep.max_ratio < 50.0);
  }

  SUBCASE("kind parsing") {
    CHECK(audit_kind_from_string("gn") == AuditKind::gn);
    CHECK(audit_kind_from_string("aniso-interp") == AuditKind::aniso_interp);
    CHECK_THROWS_AS(audit_kind_from_string("nope"), std::invalid_argument);
  }
}

TEST_SUITE_END();
