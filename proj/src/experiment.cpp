#include "slowflow/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <future>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "slowflow/fft.hpp"
#include "slowflow/io_util.hpp"
#include "slowflow/spectral.hpp"

namespace slowflow {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<ModeSpec> modes_from_json(const json& j) {
  std::vector<ModeSpec> out;
  for (const auto& e : j) {
    ModeSpec m;
    m.k1 = e.value("k1", 0);
    m.k2 = e.value("k2", 0);
    m.k3 = e.value("k3", 0);
    m.amp = e.value("amp", 1.0);
    m.phase = e.value("phase", 0.0);
    out.push_back(m);
  }
  return out;
}

json modes_to_json(const std::vector<ModeSpec>& modes) {
  json out = json::array();
  for (const auto& m : modes)
    out.push_back({{"k1", m.k1},
                   {"k2", m.k2},
                   {"k3", m.k3},
                   {"amp", m.amp},
                   {"phase", m.phase}});
  return out;
}

// Band-limited even bump: sum_{1<=j<=kmax} exp(-(j/sigma)^2) cos(j x),
// normalized so the physical max is 1.
void add_bump_modes(std::vector<std::pair<int, double>>& out, int kmax) {
  const double sigma = std::max(1.0, kmax / 2.0);
  double peak = 0.0;
  for (int j = 1; j <= kmax; ++j) peak += std::exp(-double(j * j) / (sigma * sigma));
  for (int j = 1; j <= kmax; ++j)
    out.emplace_back(j, std::exp(-double(j * j) / (sigma * sigma)) / peak);
}

// Adds amp * cos(k.x + phase) to the spectral coefficients of f.
void add_cosine(ScalarField& f, int k1, int k2, int k3, double amp,
                double phase) {
  const Grid& g = f.g();
  auto wrap = [](int k, int n) { return ((k % n) + n) % n; };
  const int i1 = wrap(k1, g.n1());
  const int i2 = wrap(k2, g.n2());
  const int i3 = g.is2d() ? 0 : wrap(k3, g.n3());
  const int j1 = wrap(-k1, g.n1());
  const int j2 = wrap(-k2, g.n2());
  const int j3 = g.is2d() ? 0 : wrap(-k3, g.n3());
  const cplx half = 0.5 * amp * std::exp(cplx{0.0, phase});
  f.at(i1, i2, i3) += half;
  f.at(j1, j2, j3) += std::conj(half);
}

ScalarField field_from_modes(const GridPtr& grid,
                             const std::vector<ModeSpec>& modes) {
  ScalarField f(grid);
  for (const auto& m : modes) add_cosine(f, m.k1, m.k2, m.k3, m.amp, m.phase);
  f.enforce_zero_mean();
  return f;
}

// Default stream function: separable band-limited bump in x_h modulated by
// cos(y3) in the slow vertical (plus a y3-independent part).
ScalarField default_phi(const GridPtr& slow, double amp, int kmax) {
  std::vector<std::pair<int, double>> bump;
  add_bump_modes(bump, kmax);
  ScalarField phi(slow);
  for (const auto& [j1, a1] : bump)
    for (const auto& [j2, a2] : bump) {
      add_cosine(phi, j1, j2, 0, 0.5 * amp * a1 * a2, 0.3 * j1);
      if (!slow->is2d())
        add_cosine(phi, j1, j2, 1, 0.5 * amp * a1 * a2, 0.7 * j2);
    }
  phi.enforce_zero_mean();
  return phi;
}

// Divergence-free 3-component field from a band-limited vector potential.
VectorField default_w0(const GridPtr& slow, double amp, int kmax) {
  std::vector<std::pair<int, double>> bump;
  add_bump_modes(bump, kmax);
  std::vector<ScalarField> psi;
  for (int c = 0; c < 3; ++c) psi.emplace_back(slow);
  for (const auto& [j, a] : bump) {
    add_cosine(psi[0], 0, j, 1, amp * a, 0.2 * j);
    add_cosine(psi[1], j, 0, 1, amp * a, 1.1 * j);
    add_cosine(psi[2], j, j, 0, 0.5 * amp * a, 0.6 * j);
  }
  // w = curl psi
  std::vector<ScalarField> w{derivative(psi[2], 2) - derivative(psi[1], 3),
                             derivative(psi[0], 3) - derivative(psi[2], 1),
                             derivative(psi[1], 1) - derivative(psi[0], 2)};
  VectorField out(std::move(w));
  out.enforce_zero_mean();
  return out;
}

SliceState slices_from_phi(const ScalarField& phi_slow) {
  // v = (-d2 phi, d1 phi) per slice
  std::vector<ScalarField> comps{-1.0 * derivative(phi_slow, 2),
                                 derivative(phi_slow, 1)};
  return slow_to_slices(VectorField(std::move(comps)), 0.0);
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig c;
  try {
    c.schema_version = j.value("schema_version", 1);
    if (c.schema_version != 1)
      throw ConfigError("unsupported schema_version");
    c.n1 = j.value("n1", c.n1);
    c.n2 = j.value("n2", c.n2);
    c.n3_slow = j.value("n3_slow", c.n3_slow);
    c.n3_fast = j.value("n3_fast", c.n3_fast);
    c.L1 = j.value("L1", c.L1);
    c.L2 = j.value("L2", c.L2);
    c.L3_slow = j.value("L3_slow", c.L3_slow);
    if (j.contains("eps_m")) c.eps_m = j["eps_m"].get<std::vector<int>>();
    c.T = j.value("T", c.T);
    c.dt = j.value("dt", c.dt);
    c.sample_every = j.value("sample_every", c.sample_every);
    c.generator = j.value("generator", c.generator);
    c.phi_preset = j.value("phi_preset", c.phi_preset);
    if (j.contains("phi_modes")) c.phi_modes = modes_from_json(j["phi_modes"]);
    c.v_amplitude = j.value("v_amplitude", c.v_amplitude);
    c.w_amplitude = j.value("w_amplitude", c.w_amplitude);
    c.v_kmax = j.value("v_kmax", c.v_kmax);
    c.w_kmax = j.value("w_kmax", c.w_kmax);
    if (j.contains("f_modes")) c.f_modes = modes_from_json(j["f_modes"]);
    if (j.contains("g_modes")) c.g_modes = modes_from_json(j["g_modes"]);
    c.seed = j.value("seed", c.seed);
    c.lambda = j.value("lambda", c.lambda);
    c.ceiling_factor = j.value("ceiling_factor", c.ceiling_factor);
    c.direct_solve = j.value("direct_solve", c.direct_solve);
    c.threads = j.value("threads", c.threads);
    c.out_dir = j.value("out_dir", c.out_dir);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  if (c.eps_m.size() < 1) throw ConfigError("eps_m must be nonempty");
  if (c.dt <= 0.0) throw ConfigError("dt must be positive");
  if (c.T <= 0.0) throw ConfigError("T must be positive");
  for (int m : c.eps_m) {
    if (m < 1) throw ConfigError("eps_m entries must be >= 1");
    if (c.n3_fast % m != 0)
      throw ConfigError("every eps must be admissible: m | n3_fast");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_json_text(read_text_file(path));
}

std::string config_to_json_text(const ExperimentConfig& c) {
  ordered_json j;
  j["schema_version"] = c.schema_version;
  j["n1"] = c.n1;
  j["n2"] = c.n2;
  j["n3_slow"] = c.n3_slow;
  j["n3_fast"] = c.n3_fast;
  j["L1"] = c.L1;
  j["L2"] = c.L2;
  j["L3_slow"] = c.L3_slow;
  j["eps_m"] = c.eps_m;
  j["T"] = c.T;
  j["dt"] = c.dt;
  j["sample_every"] = c.sample_every;
  j["generator"] = c.generator;
  j["phi_preset"] = c.phi_preset;
  j["phi_modes"] = modes_to_json(c.phi_modes);
  j["v_amplitude"] = c.v_amplitude;
  j["w_amplitude"] = c.w_amplitude;
  j["v_kmax"] = c.v_kmax;
  j["w_kmax"] = c.w_kmax;
  j["f_modes"] = modes_to_json(c.f_modes);
  j["g_modes"] = modes_to_json(c.g_modes);
  j["seed"] = c.seed;
  j["lambda"] = c.lambda;
  j["ceiling_factor"] = c.ceiling_factor;
  j["direct_solve"] = c.direct_solve;
  j["threads"] = c.threads;
  j["out_dir"] = c.out_dir;
  return j.dump(2);
}

ScalarField product_factor_2d(const ExperimentConfig& cfg) {
  GridPtr h = make_grid(cfg.n1, cfg.n2, cfg.L1, cfg.L2);
  if (!cfg.f_modes.empty()) return field_from_modes(h, cfg.f_modes);
  std::vector<std::pair<int, double>> bump;
  add_bump_modes(bump, std::max(1, cfg.v_kmax));
  ScalarField f(h);
  for (const auto& [j1, a1] : bump)
    for (const auto& [j2, a2] : bump)
      add_cosine(f, j1, j2, 0, cfg.v_amplitude * a1 * a2, 0.0);
  f.enforce_zero_mean();
  return f;
}

InitialData generate_initial_data(const ExperimentConfig& cfg,
                                  const EpsParams& ep) {
  InitialData out;
  if (cfg.generator == "stream2d") {
    ScalarField phi;
    if (cfg.phi_preset == "modes") {
      phi = field_from_modes(ep.slow, cfg.phi_modes);
      phi *= cfg.v_amplitude;
    } else if (cfg.phi_preset == "random") {
      Rng rng(cfg.seed);
      phi = random_scalar(ep.slow, std::max(1, cfg.v_kmax), rng);
      phi *= cfg.v_amplitude / std::max(linf_norm(phi), 1e-300);
    } else if (cfg.phi_preset == "bump") {
      phi = default_phi(ep.slow, cfg.v_amplitude, std::max(1, cfg.v_kmax));
    } else {
      throw ConfigError("unknown phi_preset: " + cfg.phi_preset);
    }
    out.v0 = slices_from_phi(phi);
    out.w0_slow = cfg.w_amplitude != 0.0
                      ? default_w0(ep.slow, cfg.w_amplitude,
                                   std::max(1, cfg.w_kmax))
                      : VectorField(ep.slow, 3, true);
    if (divergence_defect(out.w0_slow) > 1e-10)
      throw ConfigError("generated w0 is not solenoidal");
  } else if (cfg.generator == "oscillatory") {
    // cos(x3/eps) (d2 phi, -d1 phi, 0) on the fast grid; x3/eps has integer
    // index m * L3_fast / (2 pi L3_slow) ... with L3_fast = m L3_slow the
    // oscillation sits at fast vertical index m^2 / ... use index m on a
    // fast box of one slow period: admissibility requires 3 m < n3_fast.
    GridPtr h = make_grid(cfg.n1, cfg.n2, cfg.L1, cfg.L2);
    ScalarField phi2d;
    if (!cfg.phi_modes.empty()) {
      phi2d = field_from_modes(h, cfg.phi_modes);
      phi2d *= cfg.v_amplitude;
    } else {
      phi2d = product_factor_2d(cfg);
    }
    GridPtr fast = make_grid(cfg.n1, cfg.n2, cfg.n3_fast, cfg.L1, cfg.L2,
                             cfg.L3_slow);
    const int kosc = int(std::llround(cfg.L3_slow / (2.0 * std::numbers::pi))) *
                     ep.m;
    if (3 * kosc >= cfg.n3_fast)
      throw ConfigError("oscillatory: 1/eps beyond the fast dealias band");
    ScalarField mod(fast);
    add_cosine(mod, 0, 0, kosc, 1.0, 0.0);
    ScalarField d2(fast), d1(fast);
    // lift the 2D derivatives onto the fast grid, then modulate
    const ScalarField p1 = derivative(phi2d, 1);
    const ScalarField p2 = derivative(phi2d, 2);
    for (int i1 = 0; i1 < cfg.n1; ++i1)
      for (int i2 = 0; i2 < cfg.n2; ++i2) {
        d1.at(i1, i2, 0) = p1.at(i1, i2, 0);
        d2.at(i1, i2, 0) = p2.at(i1, i2, 0);
      }
    std::vector<ScalarField> comps{multiply_dealiased(mod, d2),
                                   -1.0 * multiply_dealiased(mod, d1),
                                   ScalarField(fast, true)};
    out.fast = VectorField(std::move(comps));
    out.fast.enforce_zero_mean();
  } else if (cfg.generator == "product") {
    const ScalarField f2d = product_factor_2d(cfg);
    // g may carry a mean (g = 1 is legal); only f is mean-free
    ScalarField g_slow(ep.slow);
    if (cfg.g_modes.empty())
      add_cosine(g_slow, 0, 0, 1, 1.0, 0.0);
    else
      for (const auto& m : cfg.g_modes)
        add_cosine(g_slow, 0, 0, m.k3, m.amp, m.phase);
    // h(x) = f(x_h) g(y3), then y3 = eps x3
    ScalarField prod_slow(ep.slow);
    const auto pf = to_physical(f2d);
    const auto pg = to_physical(g_slow);
    std::vector<double> vals(ep.slow->size());
    const Grid& gs = *ep.slow;
    for (int i1 = 0; i1 < gs.n1(); ++i1)
      for (int i2 = 0; i2 < gs.n2(); ++i2)
        for (int i3 = 0; i3 < gs.n3(); ++i3)
          vals[gs.index(i1, i2, i3)] =
              pf[f2d.g().index(i1, i2, 0)] * pg[gs.index(i1, i2, i3)];
    prod_slow = from_physical(ep.slow, vals);
    prod_slow.enforce_zero_mean();
    out.product_field = slow_to_fast(prod_slow, ep);
  } else {
    throw ConfigError("unknown generator: " + cfg.generator);
  }
  return out;
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg) {
  GridPtr slow = make_grid(cfg.n1, cfg.n2, cfg.n3_slow, cfg.L1, cfg.L2,
                           cfg.L3_slow);
  std::vector<int> ms = cfg.eps_m;
  std::sort(ms.begin(), ms.end());  // ascending m = descending eps

  auto run_point = [&](int m) {
    SweepRecord rec;
    rec.m = m;
    rec.eps = 1.0 / m;
    const auto t_start = std::chrono::steady_clock::now();
    try {
      EpsParams ep = make_eps_params(slow, cfg.n3_fast, m, cfg.T, cfg.dt);
      InitialData data = generate_initial_data(cfg, ep);
      PipelineOptions opt;
      opt.direct_solve = cfg.direct_solve;
      opt.sample_every = cfg.sample_every;
      opt.lambda = cfg.lambda;
      opt.ceiling_factor = cfg.ceiling_factor;
      PipelineResult res = run_pipeline(data.v0, data.w0_slow, ep, opt);
      rec.sup_r_h12 = res.sup_r_h12;
      rec.terminal_r_h12 = res.terminal_r_h12;
      rec.f_press = res.f_press_l2t;
      rec.f_lin = res.f_lin_l2t;
      rec.f_nonlin = res.f_nonlin_l2t;
      rec.f_total = res.f_total_l2t;
      rec.blowup = res.blowup;
      rec.cfl_warning = res.cfl_warned;
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
    rec.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    return rec;
  };

  std::vector<SweepRecord> recs(ms.size());
  if (cfg.threads > 1 && ms.size() > 1) {
    std::vector<std::future<SweepRecord>> futs;
    for (int m : ms)
      futs.push_back(std::async(std::launch::async, [&run_point, m] {
        detail::enable_ftz();
        return run_point(m);
      }));
    for (std::size_t i = 0; i < futs.size(); ++i) recs[i] = futs[i].get();
  } else {
    for (std::size_t i = 0; i < ms.size(); ++i) recs[i] = run_point(ms[i]);
  }
  return recs;
}

FitResult fit_scaling(const std::vector<double>& eps,
                      const std::vector<double>& values) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < eps.size() && i < values.size(); ++i)
    if (values[i] > 0.0 && eps[i] > 0.0) {
      x.push_back(std::log(eps[i]));
      y.push_back(std::log(values[i]));
    }
  FitResult fit;
  fit.points = int(x.size());
  if (fit.points < 3) return fit;  // r2 = 0 signals "insufficient points"
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ymean = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.slope * x[i] + fit.intercept;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ymean) * (y[i] - ymean);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

FitResult fit_scaling(const std::vector<SweepRecord>& recs,
                      double SweepRecord::* field) {
  std::vector<double> eps, vals;
  for (const auto& r : recs) {
    if (r.failed) continue;
    eps.push_back(r.eps);
    vals.push_back(r.*field);
  }
  return fit_scaling(eps, vals);
}

ReportPaths default_report_paths(const std::string& out_dir) {
  return ReportPaths{out_dir + "/sweep.csv", out_dir + "/sweep.ndjson",
                     out_dir + "/forcing.ndjson", out_dir + "/summary.txt"};
}

std::string sweep_record_json(const SweepRecord& rec) {
  ordered_json j;
  j["eps"] = rec.eps;
  j["m"] = rec.m;
  j["sup_r_h12"] = rec.sup_r_h12;
  j["terminal_r_h12"] = rec.terminal_r_h12;
  j["f_press"] = rec.f_press;
  j["f_lin"] = rec.f_lin;
  j["f_nonlin"] = rec.f_nonlin;
  j["f_total"] = rec.f_total;
  j["blowup"] = rec.blowup;
  j["cfl_warning"] = rec.cfl_warning;
  j["failed"] = rec.failed;
  if (rec.failed) j["error"] = rec.error;
  return j.dump();
}

std::string normrecord_json(const NormRecord& rec) {
  ordered_json j;
  j["name"] = rec.name;
  j["value"] = rec.value;
  for (const auto& [k, v] : rec.params) j[k] = v;
  return j.dump();
}

void emit_report(const std::vector<SweepRecord>& recs,
                 const ExperimentConfig& cfg, const ReportPaths& paths) {
  namespace fs = std::filesystem;
  for (const auto& p : {paths.csv, paths.ndjson, paths.forcing, paths.summary}) {
    const fs::path dir = fs::path(p).parent_path();
    std::error_code ec;
    if (!dir.empty()) fs::create_directories(dir, ec);
  }

  CsvWriter csv(paths.csv,
                {"eps", "m", "sup_r_h12", "terminal_r_h12", "f_press", "f_lin",
                 "f_nonlin", "f_total", "runtime_s", "blowup", "cfl_warning",
                 "failed"});
  for (const auto& r : recs)
    csv.row({r.eps, double(r.m), r.sup_r_h12, r.terminal_r_h12, r.f_press,
             r.f_lin, r.f_nonlin, r.f_total, r.runtime_s, double(r.blowup),
             double(r.cfl_warning), double(r.failed)});

  NdjsonWriter nd(paths.ndjson);
  for (const auto& r : recs) nd.line(sweep_record_json(r));

  NdjsonWriter fnd(paths.forcing);
  for (const auto& r : recs) {
    if (r.failed) continue;
    const std::pair<const char*, double> comps[] = {{"pressure", r.f_press},
                                                    {"linear", r.f_lin},
                                                    {"nonlinear", r.f_nonlin},
                                                    {"total", r.f_total}};
    for (const auto& [name, value] : comps) {
      ordered_json j;
      j["eps"] = r.eps;
      j["t_horizon"] = cfg.T;
      j["component"] = name;
      j["norm_L2t_Hm12"] = value;
      fnd.line(j.dump());
    }
  }

  std::ostringstream s;
  s << "slowflow sweep summary\n";
  s << "measurement horizon T = " << fmt_double(cfg.T)
    << " (finite window; decay statements below are over this horizon)\n";
  s << "eps ladder:";
  for (const auto& r : recs) s << " 1/" << r.m;
  s << "\n\n";
  struct Row {
    const char* label;
    double SweepRecord::* field;
    double expected;
  };
  const Row rows[] = {
      {"forcing total      (expected exponent >= 1/3)", &SweepRecord::f_total,
       1.0 / 3.0},
      {"forcing pressure   (expected exponent >= 1/3)", &SweepRecord::f_press,
       1.0 / 3.0},
      {"forcing nonlinear  (expected exponent >= 1/3)", &SweepRecord::f_nonlin,
       1.0 / 3.0},
      {"forcing linear     (expected exponent >= 1/2)", &SweepRecord::f_lin,
       0.5},
      {"sup_t remainder H^1/2 (expected decreasing)", &SweepRecord::sup_r_h12,
       0.0},
  };
  for (const auto& row : rows) {
    const FitResult fit = fit_scaling(recs, row.field);
    s << row.label << ": ";
    if (fit.points < 3)
      s << "insufficient points for fit (" << fit.points << ")\n";
    else
      s << "measured slope " << fmt_double(fit.slope) << " (r2 "
        << fmt_double(fit.r2) << ", " << fit.points << " points)\n";
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < recs.size(); ++i)
    if (!recs[i].failed && !recs[i - 1].failed &&
        recs[i].sup_r_h12 >= recs[i - 1].sup_r_h12)
      decreasing = false;
  s << "remainder strictly decreasing along the ladder: "
    << (decreasing ? "yes" : "no") << "\n";
  for (const auto& r : recs) {
    if (r.failed) s << "eps 1/" << r.m << " FAILED: " << r.error << "\n";
    if (r.blowup) s << "eps 1/" << r.m << " hit the blow-up ceiling\n";
  }
  double total_rt = 0.0;
  for (const auto& r : recs) total_rt += r.runtime_s;
  s << "total runtime " << fmt_double(total_rt) << " s\n";
  write_text_file(paths.summary, s.str());
}

}  // namespace slowflow
