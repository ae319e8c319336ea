#include <doctest.h>

#include <numbers>

#include "slowflow/ns2d.hpp"
#include "slowflow/norms.hpp"
#include "slowflow/rng.hpp"
#include "slowflow/spectral.hpp"
#include "test_util.hpp"

using namespace slowflow;
using slowflow::testutil::rel_l2_error;
using slowflow::testutil::sample;
using slowflow::testutil::taylor_green;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

SliceState make_slices(const GridPtr& hgrid,
                       const std::vector<VectorField>& fields) {
  SliceState s;
  s.hgrid = hgrid;
  s.v = fields;
  for (std::size_t i = 0; i < fields.size(); ++i)
    s.y3.push_back(kTwoPi * double(i) / double(fields.size()));
  return s;
}
}  // namespace

TEST_SUITE_BEGIN("ns2d");

TEST_CASE("pressure_p0 closed forms") {
  auto g = make_grid(32, 32, kTwoPi, kTwoPi);

  const VectorField zero(g, 2, true);
  CHECK(pressure_p0(zero).max_abs_coeff() == 0.0);

  // Taylor-Green: p0 = (cos 2x + cos 2y)/4 from p0 = (-Lap)^{-1} dd(v v)
  const VectorField tg = taylor_green(g);
  const ScalarField p = pressure_p0(tg);
  const ScalarField want = sample(g, [](double x, double y, double) {
    return 0.25 * (std::cos(2.0 * x) + std::cos(2.0 * y));
  });
  CHECK(rel_l2_error(p, want) < 1e-12);
  CHECK(std::abs(p[0]) == 0.0);  // zero mean

  // shear flow (phi(x2), 0): dd(v v) vanishes
  std::vector<ScalarField> shear{sample(g, [](double, double y, double) {
                                   return std::sin(y) + 0.5 * std::cos(3 * y);
                                 }),
                                 ScalarField(g, true)};
  CHECK(pressure_p0(VectorField(std::move(shear))).max_abs_coeff() < 1e-14);

  // grad p0 equals minus the gradient part of v . grad v
  Rng rng(23);
  const VectorField v = random_vector(g, 2, 6, rng, true);
  const VectorField adv = convect(v, v, {1, 2});
  const VectorField grad_part = adv - weighted_leray_project(adv);
  const ScalarField p0 = pressure_p0(v);
  VectorField grad_p(std::vector<ScalarField>{derivative(p0, 1),
                                              derivative(p0, 2)});
  CHECK(rel_l2_error(grad_p, -1.0 * grad_part) < 1e-10);

  auto g3 = make_grid(8, 8, 8, kTwoPi, kTwoPi, kTwoPi);
  CHECK_THROWS_AS(pressure_p0(VectorField(g3, 2)), std::invalid_argument);
}

TEST_CASE("ns2d_rhs vanishing cases") {
  auto g = make_grid(32, 32, kTwoPi, kTwoPi);
  CHECK(ns2d_rhs(VectorField(g, 2, true)).max_abs_coeff() == 0.0);
  CHECK(ns2d_rhs(taylor_green(g)).max_abs_coeff() < 1e-14);
  std::vector<ScalarField> shear{sample(g, [](double, double y, double) {
                                   return std::sin(y);
                                 }),
                                 ScalarField(g, true)};
  CHECK(ns2d_rhs(VectorField(std::move(shear))).max_abs_coeff() < 1e-14);
}

TEST_CASE("ns2d_step exact solutions") {
  auto g = make_grid(32, 32, kTwoPi, kTwoPi);
  const double dt = 1e-2;

  CHECK(ns2d_step(VectorField(g, 2, true), dt).max_abs_coeff() == 0.0);

  // Taylor-Green: v(t) = e^{-2t} v0, reproduced exactly (N(v) = 0)
  const VectorField tg = taylor_green(g);
  VectorField v = tg;
  for (int k = 0; k < 20; ++k) v = ns2d_step(v, dt);
  CHECK(rel_l2_error(v, std::exp(-2.0 * 20 * dt) * tg) < 1e-12);

  // single-shear mode decays with its |k|^2 = 1 heat rate, exactly
  std::vector<ScalarField> sh{sample(g, [](double, double y, double) {
                                return std::sin(y);
                              }),
                              ScalarField(g, true)};
  const VectorField shear(std::move(sh));
  const VectorField stepped = ns2d_step(shear, dt);
  CHECK(rel_l2_error(stepped, std::exp(-dt) * shear) < 1e-13);

  // CFL advisory fires on absurd steps
  StepInfo info;
  ns2d_step(100.0 * tg, 1.0, &info);
  CHECK(info.cfl_warning);
  CHECK(info.cfl > 1.0);

  // NaN input is fatal
  VectorField bad = tg;
  bad[0][3] = cplx{std::nan(""), 0.0};
  CHECK_THROWS_AS(ns2d_step(bad, dt), NumericalError);

  CHECK_THROWS_AS(ns2d_step(tg, -0.1), std::invalid_argument);
}

TEST_CASE("solve_slice_family structure") {
  auto g = make_grid(16, 16, kTwoPi, kTwoPi);
  const VectorField tg = taylor_green(g);

  SUBCASE("zero data stays zero") {
    const SliceState z = make_slices(g, {VectorField(g, 2, true),
                                         VectorField(g, 2, true)});
    const SliceTrajectory traj = solve_slice_family(z, 0.1, 0.01);
    for (const auto& st : traj.states)
      for (const auto& s : st.v) CHECK(s.max_abs_coeff() == 0.0);
  }

  SUBCASE("equal slices give bitwise-equal outputs") {
    const SliceState s = make_slices(g, {tg, tg, tg});
    const SliceTrajectory traj = solve_slice_family(s, 0.05, 0.01);
    const auto& last = traj.states.back();
    for (int c = 0; c < 2; ++c) {
      const auto a = last.v[0][c].coeffs();
      for (int sl : {1, 2}) {
        const auto b = last.v[sl][c].coeffs();
        bool equal = true;
        for (std::size_t i = 0; i < a.size(); ++i)
          if (a[i] != b[i]) equal = false;
        CHECK(equal);
      }
    }
  }

  SUBCASE("cos(y3)-scaled Taylor-Green decays per slice") {
    std::vector<VectorField> slices;
    std::vector<double> y3s;
    for (int j = 0; j < 4; ++j) {
      const double y3 = kTwoPi * j / 4.0;
      slices.push_back(std::cos(y3) * tg);
      y3s.push_back(y3);
    }
    SliceState s = make_slices(g, slices);
    s.y3 = y3s;
    const double T = 0.2, dt = 1e-2;
    const SliceTrajectory traj = solve_slice_family(s, T, dt);
    for (int j = 0; j < 4; ++j) {
      if (l2_norm(slices[j]) < 1e-14) continue;
      const VectorField want = std::exp(-2.0 * T) * slices[j];
      CHECK(rel_l2_error(traj.states.back().v[j], want) < 1e-11);
    }
  }

  SUBCASE("permuting slices commutes with the solve, exactly") {
    Rng rng(29);
    const VectorField a = 0.3 * random_vector(g, 2, 4, rng, true);
    const VectorField b = 0.3 * random_vector(g, 2, 4, rng, true);
    const SliceTrajectory t1 =
        solve_slice_family(make_slices(g, {a, b}), 0.05, 0.01);
    const SliceTrajectory t2 =
        solve_slice_family(make_slices(g, {b, a}), 0.05, 0.01);
    for (int c = 0; c < 2; ++c) {
      const auto x = t1.states.back().v[0][c].coeffs();
      const auto y = t2.states.back().v[1][c].coeffs();
      bool equal = true;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != y[i]) equal = false;
      CHECK(equal);
    }
  }

  SUBCASE("threaded solve matches serial bitwise") {
    Rng rng(31);
    std::vector<VectorField> slices;
    for (int j = 0; j < 5; ++j)
      slices.push_back(0.2 * random_vector(g, 2, 4, rng, true));
    const SliceState s = make_slices(g, slices);
    const SliceTrajectory t1 = solve_slice_family(s, 0.04, 0.01, 1, 1);
    const SliceTrajectory t2 = solve_slice_family(s, 0.04, 0.01, 1, 4);
    for (int j = 0; j < 5; ++j)
      for (int c = 0; c < 2; ++c) {
        const auto x = t1.states.back().v[j][c].coeffs();
        const auto y = t2.states.back().v[j][c].coeffs();
        bool equal = true;
        for (std::size_t i = 0; i < x.size(); ++i)
          if (x[i] != y[i]) equal = false;
        CHECK(equal);
      }
  }

  SUBCASE("rejects non-integer horizons and bad slices") {
    CHECK_THROWS_AS(solve_slice_family(make_slices(g, {tg}), 0.055, 0.01),
                    std::invalid_argument);
    Rng rng(33);
    const VectorField bad = random_vector(g, 2, 4, rng, false);
    CHECK_THROWS_AS(solve_slice_family(make_slices(g, {bad}), 0.05, 0.01),
                    std::invalid_argument);
  }
}

TEST_CASE("energy identity diagnostics") {
  auto g = make_grid(32, 32, kTwoPi, kTwoPi);
  const VectorField tg = taylor_green(g);

  SUBCASE("zero data has zero defect") {
    const SliceState z = make_slices(g, {VectorField(g, 2, true)});
    const auto recs = energy_report(solve_slice_family(z, 0.05, 0.01));
    for (const auto& r : recs) CHECK(r.defect == 0.0);
  }

  SUBCASE("Taylor-Green defect is trapezoid-order and shrinks x4") {
    const double T = 0.25;
    auto defect_at = [&](double dt) {
      const SliceState s = make_slices(g, {tg});
      const auto traj = solve_slice_family(s, T, dt, 1 << 20);
      const auto recs = energy_report(traj);
      return recs.back().defect;
    };
    const double d1 = defect_at(2e-3);
    const double d2 = defect_at(1e-3);
    CHECK(d1 < 1e-5);
    CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.2));
  }

  SUBCASE("random slice: halving dt shrinks the defect ~4x") {
    Rng rng(37);
    const VectorField v0 = 0.5 * random_vector(g, 2, 5, rng, true);
    const double T = 0.2;
    auto defect_at = [&](double dt) {
      const SliceState s = make_slices(g, {v0});
      const auto traj = solve_slice_family(s, T, dt, 1 << 20);
      // evolved slices stay horizontally divergence-free
      CHECK(divergence_defect(traj.states.back().v[0]) < 1e-10);
      return energy_report(traj).back().defect;
    };
    const double ratio = defect_at(2e-3) / defect_at(1e-3);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.2));
  }

  SUBCASE("empty trajectory is rejected") {
    CHECK_THROWS_AS(energy_report(SliceTrajectory{}), std::invalid_argument);
  }
}

TEST_SUITE_END();
