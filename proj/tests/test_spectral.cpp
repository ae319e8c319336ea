#include <doctest.h>

#include <cstdio>
#include <numbers>

#include "slowflow/rng.hpp"
#include "slowflow/snapshot.hpp"
#include "slowflow/spectral.hpp"
#include "test_util.hpp"

using namespace slowflow;
using slowflow::testutil::rel_l2_error;
using slowflow::testutil::sample;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_SUITE_BEGIN("spectral");

TEST_CASE("make_grid wavenumber tables") {
  auto g2 = make_grid(8, 8, kTwoPi, kTwoPi);
  const double expect[8] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (int i = 0; i < 8; ++i) CHECK(g2->k1(i) == doctest::Approx(expect[i]));
  CHECK(g2->is2d());
  CHECK(g2->volume() == doctest::Approx(kTwoPi * kTwoPi));

  auto g3 = make_grid(8, 8, 8, kTwoPi, kTwoPi, kTwoPi);
  for (int i = 0; i < 8; ++i) {
    CHECK(g3->k1(i) == g3->k2(i));
    CHECK(g3->k1(i) == g3->k3(i));
  }

  auto gl = make_grid(8, 8, 8, kTwoPi, kTwoPi, 2.0 * kTwoPi);
  for (int i = 0; i < 8; ++i)
    CHECK(gl->k3(i) == doctest::Approx(0.5 * gl->k1(i)));

  // conjugate pairing k[m] = -k[n-m] away from 0 and Nyquist
  for (int i = 1; i < 8; ++i) {
    if (i == 4) continue;
    CHECK(g3->k1(i) == doctest::Approx(-g3->k1(8 - i)));
  }

  CHECK_THROWS_AS(make_grid(12, 8, kTwoPi, kTwoPi), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 8, kTwoPi, kTwoPi), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, 8, kTwoPi, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, 8, 8, kTwoPi, kTwoPi, 0.0),
                  std::invalid_argument);
}

TEST_CASE("transform pins the Fourier convention") {
  auto g = make_grid(16, 8, kTwoPi, kTwoPi);
  const ScalarField s = sample(g, [](double x, double, double) {
    return std::sin(x);
  });
  for (int i1 = 0; i1 < 16; ++i1)
    for (int i2 = 0; i2 < 8; ++i2) {
      const cplx c = s.at(i1, i2, 0);
      if (i1 == 1 && i2 == 0) {
        CHECK(std::abs(c.real()) < 1e-13);
        CHECK(c.imag() == doctest::Approx(-0.5));
      } else if (i1 == 15 && i2 == 0) {
        CHECK(c.imag() == doctest::Approx(0.5));
      } else {
        CHECK(std::abs(c) < 1e-13);
      }
    }

  const ScalarField one = sample(g, [](double, double, double) { return 1.0; });
  CHECK(std::abs(one.at(0, 0, 0) - cplx{1.0, 0.0}) < 1e-14);
  double off = 0.0;
  for (std::size_t i = 1; i < one.coeffs().size(); ++i)
    off = std::max(off, std::abs(one[i]));
  CHECK(off < 1e-14);
}

TEST_CASE("round-trip identity on random fields") {
  auto g = make_grid(32, 16, 8, 1.0, kTwoPi, 3.0);
  Rng rng(7);
  std::vector<double> vals(g->size());
  for (auto& v : vals) v = rng.uniform(-1.0, 1.0);
  const ScalarField f = from_physical(g, vals);
  const auto back = to_physical(f);
  double worst = 0.0, mag = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    worst = std::max(worst, std::abs(back[i] - vals[i]));
    mag = std::max(mag, std::abs(vals[i]));
  }
  CHECK(worst / mag < 1e-12);
  // real input => conjugate-symmetric spectrum
  CHECK(conjugate_symmetry_defect(f) < 1e-12);
}

TEST_CASE("derivative basics") {
  auto g = make_grid(16, 8, 8, kTwoPi, kTwoPi, kTwoPi);
  const ScalarField sx = sample(g, [](double x, double, double) {
    return std::sin(x);
  });
  const ScalarField cx = sample(g, [](double x, double, double) {
    return std::cos(x);
  });
  CHECK(rel_l2_error(derivative(sx, 1), cx) < 1e-13);

  const ScalarField c2z = sample(g, [](double, double, double z) {
    return std::cos(2.0 * z);
  });
  const ScalarField want = sample(g, [](double, double, double z) {
    return -2.0 * std::sin(2.0 * z);
  });
  CHECK(rel_l2_error(derivative(c2z, 3), want) < 1e-13);

  const ScalarField one = sample(g, [](double, double, double) { return 7.0; });
  CHECK(derivative(one, 2).max_abs_coeff() < 1e-13);

  auto g2 = make_grid(8, 8, kTwoPi, kTwoPi);
  const ScalarField f2 = sample(g2, [](double x, double, double) {
    return std::cos(x);
  });
  CHECK_THROWS_AS(derivative(f2, 3), std::invalid_argument);

  // mixed partials commute exactly (mode-wise multiplication)
  Rng rng(3);
  const ScalarField r = random_scalar(g, 3, rng);
  const ScalarField d12 = derivative(derivative(r, 1), 2);
  const ScalarField d21 = derivative(derivative(r, 2), 1);
  CHECK((d12 - d21).max_abs_coeff() == 0.0);
}

TEST_CASE("heat_propagate multiplier, semigroup, factorization") {
  auto g = make_grid(16, 8, 8, kTwoPi, kTwoPi, kTwoPi);
  const ScalarField cx = sample(g, [](double x, double, double) {
    return std::cos(x);
  });
  CHECK(rel_l2_error(heat_propagate(cx, std::log(2.0)), 0.5 * cx) < 1e-13);
  CHECK(rel_l2_error(heat_propagate(cx, 0.0), cx) == 0.0);

  Rng rng(11);
  const ScalarField r = random_scalar(g, 3, rng);
  for (int i = 0; i < 8; ++i) {
    const double s = rng.uniform(0.0, 0.7), t = rng.uniform(0.0, 0.7);
    const ScalarField a = heat_propagate(heat_propagate(r, s), t);
    const ScalarField b = heat_propagate(r, s + t);
    CHECK(rel_l2_error(a, b) < 1e-13);
  }

  CHECK_THROWS_AS(heat_propagate(r, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(heat_propagate(r, 1.0, {1.0, -2.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("heat factorization on product data") {
  // h(x) = f(x_h) g(x3): the 3D heat flow is the product of the horizontal
  // and vertical flows, exactly mode by mode.
  auto g3 = make_grid(16, 16, 8, kTwoPi, kTwoPi, kTwoPi);
  const ScalarField h = sample(g3, [](double x, double y, double z) {
    return std::sin(x) * std::cos(2.0 * y) * std::cos(z);
  });
  const double t = 0.37;
  const ScalarField lhs = heat_propagate(h, t);
  const ScalarField rhs = heat_propagate(
      heat_propagate(h, t, {1.0, 1.0, 0.0}), t, {0.0, 0.0, 1.0});
  CHECK(rel_l2_error(lhs, rhs) < 1e-12);
}

TEST_CASE("weighted Leray projection") {
  auto g = make_grid(16, 16, 8, kTwoPi, kTwoPi, kTwoPi);
  const double m = 0.0625;  // eps^2 with eps = 1/4

  // pure weighted gradient (d1 phi, d2 phi, m d3 phi) -> 0
  Rng rng(5);
  const ScalarField phi = random_scalar(g, 3, rng);
  VectorField grad(std::vector<ScalarField>{
      derivative(phi, 1), derivative(phi, 2), m * derivative(phi, 3)});
  const VectorField pg = weighted_leray_project(grad, m);
  CHECK(pg.max_abs_coeff() < 1e-12 * std::max(1.0, grad.max_abs_coeff()));

  // solenoidal fields pass through unchanged, any m
  const VectorField sol = random_vector(g, 3, 3, rng, true);
  for (double mm : {1.0, 0.25, 0.01}) {
    CHECK(rel_l2_error(weighted_leray_project(sol, mm), sol) < 1e-12);
  }

  // single already-solenoidal mode u = (1,0,0) e^{i x2}
  const ScalarField cy = sample(g, [](double, double y, double) {
    return std::cos(y);
  });
  VectorField u(g, 3);
  u[0] = cy;
  CHECK(rel_l2_error(weighted_leray_project(u, m), u) < 1e-13);

  // projection output is divergence-free and idempotent
  const VectorField w = random_vector(g, 3, 4, rng, false);
  const VectorField pw = weighted_leray_project(w, m);
  CHECK(divergence_defect(pw) < 1e-12);
  CHECK(rel_l2_error(weighted_leray_project(pw, m), pw) < 1e-12);

  CHECK_THROWS_AS(weighted_leray_project(w, -1.0), std::invalid_argument);
}

TEST_CASE("dealiased products") {
  auto g = make_grid(16, 16, kTwoPi, kTwoPi);
  // constant times b = truncation of b
  const ScalarField one = sample(g, [](double, double, double) { return 1.0; });
  Rng rng(9);
  const ScalarField b = random_scalar(g, 7, rng);  // content beyond the band
  CHECK(rel_l2_error(multiply_dealiased(one, b), dealias(b)) < 1e-13);

  // sin^2 identity within the band: 2 < 16/3
  const ScalarField sx = sample(g, [](double x, double, double) {
    return std::sin(x);
  });
  const ScalarField want = sample(g, [](double x, double, double) {
    return 0.5 * (1.0 - std::cos(2.0 * x));
  });
  CHECK(rel_l2_error(multiply_dealiased(sx, sx), want) < 1e-13);

  // commutative, bilinear
  const ScalarField a = random_scalar(g, 4, rng);
  const ScalarField c = random_scalar(g, 4, rng);
  CHECK(rel_l2_error(multiply_dealiased(a, c), multiply_dealiased(c, a)) <
        1e-13);
  const ScalarField lin = multiply_dealiased(a + 2.0 * c, b);
  const ScalarField lin2 =
      multiply_dealiased(a, b) + 2.0 * multiply_dealiased(c, b);
  CHECK(rel_l2_error(lin, lin2) < 1e-12);
}

TEST_CASE("dealiased product equals the enumerated mode convolution") {
  // Brute-force oracle: linear convolution over signed modes, restricted to
  // the keep band (wrapped sums land outside the band and die).
  auto g = make_grid(16, 16, kTwoPi, kTwoPi);
  Rng rng(21);
  const ScalarField a = dealias(random_scalar(g, 5, rng));
  const ScalarField b = dealias(random_scalar(g, 5, rng));

  auto coeff = [&](const ScalarField& f, int m1, int m2) -> cplx {
    if (2 * std::abs(m1) >= 16 || 2 * std::abs(m2) >= 16) return {0.0, 0.0};
    return f.at((m1 % 16 + 16) % 16, (m2 % 16 + 16) % 16, 0);
  };

  ScalarField oracle(g);
  const int band = 5;  // 3*5 < 16
  for (int o1 = -band; o1 <= band; ++o1)
    for (int o2 = -band; o2 <= band; ++o2) {
      if (!g->dealias_keep((o1 + 16) % 16, (o2 + 16) % 16, 0)) continue;
      cplx sum{0.0, 0.0};
      for (int p1 = -band; p1 <= band; ++p1)
        for (int p2 = -band; p2 <= band; ++p2)
          sum += coeff(a, p1, p2) * coeff(b, o1 - p1, o2 - p2);
      oracle.at((o1 + 16) % 16, (o2 + 16) % 16, 0) = sum;
    }

  CHECK(rel_l2_error(multiply_dealiased(a, b), oracle) < 1e-12);

  // an explicit over-the-cutoff pair: modes 4 and 3 sum to 7 >= 16/3
  const ScalarField c4 = sample(g, [](double x, double, double) {
    return std::cos(4.0 * x);
  });
  const ScalarField c3 = sample(g, [](double x, double, double) {
    return std::cos(3.0 * x);
  });
  const ScalarField prod = multiply_dealiased(c4, c3);
  CHECK(std::abs(prod.at(7, 0, 0)) < 1e-14);                    // sum killed
  CHECK(std::abs(prod.at(1, 0, 0) - cplx{0.25, 0.0}) < 1e-13);  // difference
}

TEST_CASE("operations preserve reality") {
  auto g = make_grid(16, 8, 8, kTwoPi, kTwoPi, kTwoPi);
  Rng rng(13);
  const ScalarField f = random_scalar(g, 3, rng);
  CHECK(conjugate_symmetry_defect(derivative(f, 1)) < 1e-13);
  CHECK(conjugate_symmetry_defect(heat_propagate(f, 0.3)) < 1e-13);
  CHECK(conjugate_symmetry_defect(multiply_dealiased(f, f)) < 1e-12);
  const VectorField v = random_vector(g, 3, 3, rng, false);
  const VectorField pv = weighted_leray_project(v, 0.25);
  for (int c = 0; c < 3; ++c)
    CHECK(conjugate_symmetry_defect(pv[c]) < 1e-12);
}

TEST_CASE("convective and divergence advection agree on solenoidal fields") {
  auto g = make_grid(16, 16, 8, kTwoPi, kTwoPi, kTwoPi);
  Rng rng(17);
  const VectorField u = random_vector(g, 3, 2, rng, true);
  const VectorField b = random_vector(g, 3, 2, rng, true);
  CHECK(rel_l2_error(convect(u, b), advect_div(u, b)) < 1e-12);
}

TEST_CASE("binary snapshot round-trip") {
  auto g = make_grid(16, 8, 8, kTwoPi, kTwoPi, 2.0 * kTwoPi);
  Rng rng(19);
  const VectorField v = random_vector(g, 3, 3, rng, true);
  const std::string path = "snapshot_test.slow";
  save_snapshot(path, v);
  const VectorField back = load_snapshot(path);
  REQUIRE(back.ncomp() == 3);
  CHECK(back.g().same_shape(*g));
  for (int c = 0; c < 3; ++c) {
    const auto a = v[c].coeffs();
    const auto b = back[c].coeffs();
    bool equal = true;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) equal = false;
    CHECK(equal);
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_snapshot("does_not_exist.slow"), IoError);
}

TEST_SUITE_END();
