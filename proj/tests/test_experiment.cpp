#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "slowflow/experiment.hpp"
#include "slowflow/io_util.hpp"
#include "slowflow/norms.hpp"
#include "slowflow/spectral.hpp"
#include "test_util.hpp"

using namespace slowflow;
using slowflow::testutil::rel_l2_error;
using slowflow::testutil::sample;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.n1 = c.n2 = 16;
  c.n3_slow = 8;
  c.n3_fast = 16;
  c.eps_m = {2, 4};
  c.T = 0.04;
  c.dt = 4e-3;
  c.sample_every = 2;
  c.v_amplitude = 1.0;
  c.w_amplitude = 0.5;
  return c;
}
}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("fit_scaling") {
  // exact power laws are recovered to machine precision
  std::vector<double> eps{0.25, 0.125, 0.0625, 0.03125};
  std::vector<double> v_half, v_third;
  for (double e : eps) {
    v_half.push_back(std::sqrt(e));
    v_third.push_back(3.0 * std::cbrt(e));
  }
  const FitResult f1 = fit_scaling(eps, v_half);
  CHECK(f1.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f1.r2 == doctest::Approx(1.0).epsilon(1e-12));
  const FitResult f2 = fit_scaling(eps, v_third);
  CHECK(f2.slope == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(f2.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  // 1% multiplicative noise moves the slope by well under 0.02
  Rng rng(97);
  std::vector<double> noisy;
  for (double e : eps)
    noisy.push_back(std::pow(e, 0.4) * (1.0 + 0.01 * rng.uniform(-1.0, 1.0)));
  const FitResult f3 = fit_scaling(eps, noisy);
  CHECK(std::abs(f3.slope - 0.4) < 0.02);

  // nonpositive values are skipped; < 3 usable points flagged
  const FitResult f4 = fit_scaling({0.25, 0.125, 0.0625}, {1.0, -1.0, 0.5});
  CHECK(f4.points == 2);
  CHECK(f4.r2 == 0.0);
}

TEST_CASE("config parsing and validation") {
  ExperimentConfig c = tiny_config();
  const std::string text = config_to_json_text(c);
  const ExperimentConfig back = config_from_json_text(text);
  CHECK(back.n1 == c.n1);
  CHECK(back.eps_m == c.eps_m);
  CHECK(back.T == c.T);
  CHECK(back.dt == c.dt);
  CHECK(back.seed == c.seed);

  CHECK_THROWS_AS(config_from_json_text("{nope"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("{\"schema_version\": 2}"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json_text(
                      "{\"eps_m\": [3], \"n3_fast\": 16}"),
                  ConfigError);  // 3 does not divide 16
  CHECK_THROWS_AS(config_from_json_text("{\"dt\": -1.0}"), ConfigError);
}

TEST_CASE("generators") {
  ExperimentConfig c = tiny_config();
  auto slow = make_grid(c.n1, c.n2, c.n3_slow, c.L1, c.L2, c.L3_slow);
  EpsParams ep = make_eps_params(slow, c.n3_fast, 4, c.T, c.dt);

  SUBCASE("stream2d with an explicit mode: v0 = (-d2 phi, d1 phi)") {
    c.phi_preset = "modes";
    c.phi_modes = {ModeSpec{1, 1, 0, 1.0, 0.0}};  // cos(x1 + x2)
    c.w_amplitude = 0.0;
    const InitialData data = generate_initial_data(c, ep);
    REQUIRE(data.v0.count() == c.n3_slow);
    const GridPtr h = data.v0.hgrid;
    const ScalarField e0 = sample(h, [](double x, double y, double) {
      return std::sin(x + y);  // -d2 cos(x1+x2)
    });
    CHECK(rel_l2_error(data.v0.v[0][0], e0) < 1e-12);
    CHECK(rel_l2_error(data.v0.v[0][1], -1.0 * e0) < 1e-12);  // d1 cos(x1+x2)
    CHECK(data.w0_slow.max_abs_coeff() == 0.0);
  }

  SUBCASE("default stream2d data is solenoidal and y3-dependent") {
    const InitialData data = generate_initial_data(c, ep);
    CHECK(slice_divergence_defect(data.v0) < 1e-12);
    CHECK(divergence_defect(data.w0_slow) < 1e-10);
    // slices differ across y3 (otherwise the forcing is trivial)
    CHECK(l2_norm(data.v0.v[0] - data.v0.v[2]) > 1e-6);
  }

  SUBCASE("product with f = cos x1, g = 1 gives cos x1 for every eps") {
    c.generator = "product";
    c.f_modes = {ModeSpec{1, 0, 0, 1.0, 0.0}};
    c.g_modes = {ModeSpec{0, 0, 0, 1.0, 0.0}};  // constant 1
    for (int m : {2, 4}) {
      EpsParams e = make_eps_params(slow, c.n3_fast, m, c.T, c.dt);
      const InitialData data = generate_initial_data(c, e);
      const ScalarField want = sample(e.fast, [](double x, double, double) {
        return std::cos(x);
      });
      CHECK(rel_l2_error(data.product_field, want) < 1e-12);
    }
  }

  SUBCASE("oscillatory: modes at vertical index 1/eps on the fast grid") {
    c.generator = "oscillatory";
    c.phi_modes = {ModeSpec{1, 1, 0, 1.0, 0.0}};
    const InitialData data = generate_initial_data(c, ep);  // eps = 1/4
    REQUIRE(data.fast.ncomp() == 3);
    const Grid& g = data.fast.g();
    CHECK(g.L3() == doctest::Approx(c.L3_slow));
    // vertical support sits exactly at signed modes +-4
    double elsewhere = 0.0, at4 = 0.0;
    for (int i1 = 0; i1 < g.n1(); ++i1)
      for (int i2 = 0; i2 < g.n2(); ++i2)
        for (int i3 = 0; i3 < g.n3(); ++i3) {
          const double a = std::abs(data.fast[0].at(i1, i2, i3));
          if (i3 == 4 || i3 == g.n3() - 4)
            at4 = std::max(at4, a);
          else
            elsewhere = std::max(elsewhere, a);
        }
    CHECK(at4 > 0.1);
    CHECK(elsewhere < 1e-14);
    CHECK(divergence_defect(data.fast) < 1e-12);
  }

  SUBCASE("unknown kinds are rejected") {
    c.generator = "vortex-soup";
    CHECK_THROWS_AS(generate_initial_data(c, ep), ConfigError);
    c.generator = "stream2d";
    c.phi_preset = "???";
    CHECK_THROWS_AS(generate_initial_data(c, ep), ConfigError);
  }
}

TEST_CASE("run_sweep basics") {
  SUBCASE("trivial data: all forcing and remainders vanish") {
    ExperimentConfig c = tiny_config();
    c.w_amplitude = 0.0;
    c.phi_preset = "modes";
    c.phi_modes = {ModeSpec{1, 1, 0, 1.0, 0.0}};  // y3-independent
    const auto recs = run_sweep(c);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].eps == doctest::Approx(0.5));   // descending eps
    CHECK(recs[1].eps == doctest::Approx(0.25));
    for (const auto& r : recs) {
      CHECK(!r.failed);
      CHECK(r.f_total < 1e-12);
      CHECK(r.sup_r_h12 < 1e-12);
    }
  }

  SUBCASE("generic data: byte-identical reruns, decreasing forcing") {
    ExperimentConfig c = tiny_config();
    const auto r1 = run_sweep(c);
    const auto r2 = run_sweep(c);
    REQUIRE(r1.size() == r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i)
      CHECK(sweep_record_json(r1[i]) == sweep_record_json(r2[i]));
    CHECK(r1[1].f_total < r1[0].f_total);
    for (const auto& r : r1) CHECK(!r.failed);
  }
}

TEST_CASE("emit_report files") {
  ExperimentConfig c = tiny_config();
  const ReportPaths paths = default_report_paths("report_test_out");
  struct Cleanup {
    ~Cleanup() { std::filesystem::remove_all("report_test_out"); }
  } cleanup;

  SUBCASE("empty record list writes a valid header-only CSV") {
    emit_report({}, c, paths);
    const std::string csv = read_text_file(paths.csv);
    CHECK(csv.find("eps,m,sup_r_h12") == 0);
    CHECK(csv.find('\n') == csv.size() - 1);
    const std::string summary = read_text_file(paths.summary);
    CHECK(summary.find("insufficient points") != std::string::npos);
  }

  SUBCASE("one record flags insufficient points for fits") {
    SweepRecord rec;
    rec.eps = 0.25;
    rec.m = 4;
    rec.f_total = 0.1;
    emit_report({rec}, c, paths);
    const std::string summary = read_text_file(paths.summary);
    CHECK(summary.find("insufficient points for fit (1)") !=
          std::string::npos);
    const std::string nd = read_text_file(paths.ndjson);
    CHECK(nd.find("\"eps\":0.25") != std::string::npos);
    CHECK(nd.find("runtime") == std::string::npos);
  }
}

TEST_SUITE_END();
