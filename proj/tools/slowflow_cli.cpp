// Command-line driver: initial-data generators, per-module runs, eps sweeps,
// scaling fits and report emission. Exit codes: 0 success, 2 config error,
// 3 numerical failure, 4 I/O failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

#include "slowflow/experiment.hpp"
#include "slowflow/io_util.hpp"
#include "slowflow/snapshot.hpp"
#include "slowflow/spectral.hpp"

using namespace slowflow;

namespace {

struct CommonOpts {
  std::string config_path;
  ExperimentConfig cfg;
  // override flags (only applied when the user passed them)
  int n1 = -1, n2 = -1, n3_slow = -1, n3_fast = -1;
  std::vector<int> eps_m;
  double T = -1.0, dt = -1.0;
  int sample_every = -1;
  std::string generator, out_dir;
  std::int64_t seed = -1;
  int threads = -1;
  double lambda = -1.0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--n1", o.n1, "horizontal modes, axis 1");
  cmd->add_option("--n2", o.n2, "horizontal modes, axis 2");
  cmd->add_option("--n3-slow", o.n3_slow, "slow vertical modes");
  cmd->add_option("--n3-fast", o.n3_fast, "fast vertical modes");
  cmd->add_option("--eps-m", o.eps_m, "eps ladder as integers m (eps = 1/m)");
  cmd->add_option("--T", o.T, "time horizon");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--sample-every", o.sample_every, "diagnostic cadence");
  cmd->add_option("--generator", o.generator,
                  "initial data kind: stream2d | oscillatory | product");
  cmd->add_option("--seed", o.seed, "generator seed");
  cmd->add_option("--threads", o.threads, "worker threads");
  cmd->add_option("--lambda", o.lambda, "weight parameter");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
}

ExperimentConfig resolve(CommonOpts& o) {
  ExperimentConfig c =
      o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.n1 > 0) c.n1 = o.n1;
  if (o.n2 > 0) c.n2 = o.n2;
  if (o.n3_slow > 0) c.n3_slow = o.n3_slow;
  if (o.n3_fast > 0) c.n3_fast = o.n3_fast;
  if (!o.eps_m.empty()) c.eps_m = o.eps_m;
  if (o.T > 0) c.T = o.T;
  if (o.dt > 0) c.dt = o.dt;
  if (o.sample_every > 0) c.sample_every = o.sample_every;
  if (!o.generator.empty()) c.generator = o.generator;
  if (o.seed >= 0) c.seed = std::uint64_t(o.seed);
  if (o.threads > 0) c.threads = o.threads;
  if (o.lambda > 0) c.lambda = o.lambda;
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  // re-validate after overrides
  return config_from_json_text(config_to_json_text(c));
}

void ensure_out_dir(const ExperimentConfig& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
}

GridPtr slow_grid_of(const ExperimentConfig& c) {
  return make_grid(c.n1, c.n2, c.n3_slow, c.L1, c.L2, c.L3_slow);
}

EpsParams params_for(const ExperimentConfig& c, int m) {
  return make_eps_params(slow_grid_of(c), c.n3_fast, m, c.T, c.dt);
}

int first_m(const ExperimentConfig& c) { return c.eps_m.front(); }

// generated field for the norm subcommands, by generator kind
VectorField norm_subject(const ExperimentConfig& c, const EpsParams& ep,
                         double* eps_out) {
  const InitialData data = generate_initial_data(c, ep);
  *eps_out = ep.eps;
  if (c.generator == "product")
    return VectorField(std::vector<ScalarField>{data.product_field});
  if (c.generator == "oscillatory") return data.fast;
  return build_u0_eps(data.v0, data.w0_slow, ep);
}

int cmd_ns2d(CommonOpts& o) {
  ExperimentConfig c = resolve(o);
  ensure_out_dir(c);
  EpsParams ep = params_for(c, first_m(c));
  const InitialData data = generate_initial_data(c, ep);
  const SliceTrajectory traj = solve_slice_family(
      data.v0, c.T, c.dt, c.sample_every, c.threads);
  CsvWriter csv(c.out_dir + "/energy.csv",
                {"slice_index", "y3", "t", "energy", "dissipation", "defect"});
  for (const auto& r : energy_report(traj))
    csv.row({double(r.slice), r.y3, r.t, r.energy, r.dissipation, r.defect});
  const SliceState& last = traj.states.back();
  for (int s = 0; s < last.count(); ++s)
    save_snapshot(c.out_dir + "/slice_" + std::to_string(s) + ".slow",
                  last.v[s]);
  std::cout << "energy report: " << c.out_dir << "/energy.csv ("
            << traj.times.size() << " samples, " << last.count()
            << " slices)\n";
  return 0;
}

int cmd_transport(CommonOpts& o) {
  ExperimentConfig c = resolve(o);
  ensure_out_dir(c);
  EpsParams ep = params_for(c, first_m(c));
  const InitialData data = generate_initial_data(c, ep);
  const SliceTrajectory vt =
      solve_slice_family(data.v0, c.T, c.dt, c.sample_every, c.threads);
  const TransportTrajectory wt =
      solve_transport(data.w0_slow, ep.eps, vt, c.T, c.dt, c.sample_every);
  CsvWriter csv(c.out_dir + "/transport.csv",
                {"t", "s", "norm", "dissipation_integral"});
  for (std::size_t i = 0; i < wt.times.size(); ++i)
    for (std::size_t j = 0; j < wt.s_values.size(); ++j)
      csv.row({wt.times[i], wt.s_values[j], std::sqrt(wt.norm_sq[i][j]),
               wt.diss_integral[i][j]});
  save_snapshot(c.out_dir + "/w_final.slow", wt.states.back().w);
  std::cout << "transport report: " << c.out_dir << "/transport.csv\n";
  return 0;
}

int cmd_build_vapp(CommonOpts& o, double t_eval) {
  ExperimentConfig c = resolve(o);
  ensure_out_dir(c);
  EpsParams ep = params_for(c, first_m(c));
  const InitialData data = generate_initial_data(c, ep);
  if (t_eval < 0) t_eval = c.T;
  const SliceTrajectory vt =
      solve_slice_family(data.v0, c.T, c.dt, c.sample_every, c.threads);
  const TransportTrajectory wt =
      solve_transport(data.w0_slow, ep.eps, vt, c.T, c.dt, c.sample_every);
  const ApproxSolution va = build_vapp(vt, wt, ep, t_eval);
  save_snapshot(c.out_dir + "/vapp.slow", va.v);
  save_snapshot(c.out_dir + "/papp.slow", va.p);
  std::cout << "v_app(" << t_eval << ") -> " << c.out_dir << "/vapp.slow\n";
  return 0;
}

int cmd_forcing(CommonOpts& o) {
  ExperimentConfig c = resolve(o);
  ensure_out_dir(c);
  NdjsonWriter nd(c.out_dir + "/forcing.ndjson");
  for (int m : c.eps_m) {
    EpsParams ep = params_for(c, m);
    const InitialData data = generate_initial_data(c, ep);
    PipelineOptions opt;
    opt.sample_every = c.sample_every;
    const PipelineResult res = run_pipeline(data.v0, data.w0_slow, ep, opt);
    const std::pair<const char*, double> comps[] = {
        {"pressure", res.f_press_l2t},
        {"linear", res.f_lin_l2t},
        {"nonlinear", res.f_nonlin_l2t},
        {"total", res.f_total_l2t}};
    for (const auto& [name, value] : comps) {
      nlohmann::ordered_json j;
      j["eps"] = ep.eps;
      j["t_horizon"] = c.T;
      j["component"] = name;
      j["norm_L2t_Hm12"] = value;
      nd.line(j.dump());
    }
  }
  std::cout << "forcing norms: " << c.out_dir << "/forcing.ndjson\n";
  return 0;
}

int cmd_remainder(CommonOpts& o, bool direct) {
  ExperimentConfig c = resolve(o);
  ensure_out_dir(c);
  EpsParams ep = params_for(c, first_m(c));
  const InitialData data = generate_initial_data(c, ep);
  PipelineOptions opt;
  opt.sample_every = c.sample_every;
  opt.direct_solve = direct || c.direct_solve;
  opt.lambda = c.lambda;
  opt.ceiling_factor = c.ceiling_factor;
  const PipelineResult res = run_pipeline(data.v0, data.w0_slow, ep, opt);
  const WeightSeries ws = weight_Veps(res.times, res.veps, c.lambda);
  CsvWriter csv(c.out_dir + "/remainder.csv",
                {"t", "norm_h12", "dissipation_h12", "weight",
                 "weighted_norm"});
  for (std::size_t i = 0; i < res.times.size(); ++i)
    csv.row({res.times[i], res.r_h12[i], res.r_diss_integral[i], ws.weight(i),
             ws.weight(i) * res.r_h12[i]});
  save_snapshot(c.out_dir + "/R_final.slow", res.R_final);
  std::cout << "remainder series: " << c.out_dir
            << "/remainder.csv  sup ||R||_{H1/2} = "
            << fmt_double(res.sup_r_h12);
  if (opt.direct_solve)
    std::cout << "  ||u - vapp - R||_L2(T) = "
              << fmt_double(res.cross_validation_l2);
  if (res.blowup) std::cout << "  [blow-up ceiling hit]";
  std::cout << "\n";
  return 0;
}

int cmd_besov(CommonOpts& o) {
  ExperimentConfig c = resolve(o);
  ensure_out_dir(c);
  NdjsonWriter nd(c.out_dir + "/norms.ndjson");
  for (int m : c.eps_m) {
    EpsParams ep = params_for(c, m);
    double eps;
    const VectorField f = norm_subject(c, ep, &eps);
    const BesovResult r = besov_heat_norm(f);
    NormRecord rec{"B^{-1}_{inf,inf}", r.value,
                   {{"eps", eps}, {"t_star", r.t_star}}};
    nd.line(normrecord_json(rec));
    std::cout << "eps=1/" << m << "  besov=" << fmt_double(r.value)
              << "  t*=" << fmt_double(r.t_star) << "\n";
  }
  return 0;
}

int cmd_carleson(CommonOpts& o) {
  ExperimentConfig c = resolve(o);
  ensure_out_dir(c);
  NdjsonWriter nd(c.out_dir + "/norms.ndjson");
  for (int m : c.eps_m) {
    EpsParams ep = params_for(c, m);
    double eps;
    const VectorField f = norm_subject(c, ep, &eps);
    const double v = carleson_term(f);
    NormRecord rec{"KT_carleson", v, {{"eps", eps}}};
    nd.line(normrecord_json(rec));
    std::cout << "eps=1/" << m << "  carleson=" << fmt_double(v) << "\n";
  }
  return 0;
}

int cmd_audit(CommonOpts& o, const std::string& kind_name, int samples,
              double s_index) {
  ExperimentConfig c = resolve(o);
  ensure_out_dir(c);
  const AuditKind kind = audit_kind_from_string(kind_name);
  AuditOptions opt;
  opt.samples = samples;
  opt.seed = c.seed;
  opt.s = s_index;
  opt.m = first_m(c);
  opt.n3_fast = c.n3_fast;
  const bool planar = kind == AuditKind::gn ||
                      kind == AuditKind::product_sobolev ||
                      kind == AuditKind::trilinear;
  GridPtr grid = planar ? make_grid(c.n1, c.n2, c.L1, c.L2) : slow_grid_of(c);
  const AuditReport rep = inequality_audit(kind, grid, opt);
  CsvWriter csv(c.out_dir + "/audit.csv",
                {"kind", "samples", "max_ratio", "resolution"});
  csv.row_mixed({rep.kind, std::to_string(rep.samples),
                 fmt_double(rep.max_ratio), rep.resolution});
  std::cout << rep.kind << ": max ratio " << fmt_double(rep.max_ratio)
            << " over " << rep.samples << " samples (" << rep.resolution
            << ")\n";
  return 0;
}

int cmd_sweep(CommonOpts& o) {
  ExperimentConfig c = resolve(o);
  ensure_out_dir(c);
  const auto recs = run_sweep(c);
  emit_report(recs, c, default_report_paths(c.out_dir));
  int failures = 0;
  for (const auto& r : recs)
    if (r.failed) ++failures;
  std::cout << "sweep: " << recs.size() << " points, " << failures
            << " failures; reports in " << c.out_dir << "\n";
  if (failures > 0) {
    for (const auto& r : recs)
      if (r.failed) std::cerr << "eps=1/" << r.m << ": " << r.error << "\n";
  }
  return 0;
}

int cmd_fit(const std::string& input, const std::string& field) {
  const std::string text = read_text_file(input);
  std::vector<double> eps, vals;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string line =
        text.substr(pos, end == std::string::npos ? end : end - pos);
    pos = end == std::string::npos ? text.size() : end + 1;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    if (!j.contains(field) || !j.contains("eps")) continue;
    if (j.value("failed", false)) continue;
    eps.push_back(j["eps"].get<double>());
    vals.push_back(j[field].get<double>());
  }
  const FitResult fit = fit_scaling(eps, vals);
  if (fit.points < 3) {
    std::cout << field << ": insufficient points for fit (" << fit.points
              << ")\n";
    return 0;
  }
  std::cout << field << ": slope " << fmt_double(fit.slope) << " intercept "
            << fmt_double(fit.intercept) << " r2 " << fmt_double(fit.r2)
            << " (" << fit.points << " points)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slowflow: pseudo-spectral laboratory for slowly varying "
               "Navier-Stokes data"};
  app.require_subcommand(1);

  CommonOpts o;
  double t_eval = -1.0;
  bool direct = false;
  std::string audit_kind = "trilinear";
  int audit_samples = 1000;
  double audit_s = 0.5;
  std::string fit_input = "out/sweep.ndjson", fit_field = "f_total";

  auto* ns2d = app.add_subcommand("ns2d", "solve the 2D slice family");
  add_common(ns2d, o);
  auto* transport = app.add_subcommand("transport", "solve the linear system");
  add_common(transport, o);
  auto* vapp = app.add_subcommand("build-vapp", "assemble v_app and p_app");
  add_common(vapp, o);
  vapp->add_option("--t", t_eval, "evaluation time (default T)");
  auto* forcing = app.add_subcommand("forcing", "forcing component norms");
  add_common(forcing, o);
  auto* remainder = app.add_subcommand("remainder", "solve the remainder");
  add_common(remainder, o);
  remainder->add_flag("--direct-solve", direct,
                      "also evolve u directly and cross-validate");
  auto* besov = app.add_subcommand("besov", "heat-sup Besov norm of the data");
  add_common(besov, o);
  auto* carleson = app.add_subcommand("carleson", "parabolic Carleson term");
  add_common(carleson, o);
  auto* audit = app.add_subcommand("audit", "randomized inequality audit");
  add_common(audit, o);
  audit->add_option("--kind", audit_kind,
                    "gn | aniso-interp | product-sobolev | trilinear | "
                    "advection");
  audit->add_option("--samples", audit_samples, "sample count");
  audit->add_option("--s", audit_s, "regularity index (trilinear)");
  auto* sweep = app.add_subcommand("sweep", "full eps sweep with reports");
  add_common(sweep, o);
  auto* fit = app.add_subcommand("fit", "log-log fit of a sweep field");
  fit->add_option("--input", fit_input, "sweep NDJSON path");
  fit->add_option("--field", fit_field,
                  "record field: f_total | f_press | f_lin | f_nonlin | "
                  "sup_r_h12");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ns2d->parsed()) return cmd_ns2d(o);
    if (transport->parsed()) return cmd_transport(o);
    if (vapp->parsed()) return cmd_build_vapp(o, t_eval);
    if (forcing->parsed()) return cmd_forcing(o);
    if (remainder->parsed()) return cmd_remainder(o, direct);
    if (besov->parsed()) return cmd_besov(o);
    if (carleson->parsed()) return cmd_carleson(o);
    if (audit->parsed()) return cmd_audit(o, audit_kind, audit_samples, audit_s);
    if (sweep->parsed()) return cmd_sweep(o);
    if (fit->parsed()) return cmd_fit(fit_input, fit_field);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "I/O failure: " << e.what() << "\n";
    return 4;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
