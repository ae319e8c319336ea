#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slowflow/audit.hpp"
#include "slowflow/norms.hpp"
#include "slowflow/pipeline.hpp"

namespace slowflow {

// Raised on malformed configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One explicit Fourier mode of a generator: amp * cos(k . x + phase).
struct ModeSpec {
  int k1 = 0, k2 = 0, k3 = 0;
  double amp = 1.0;
  double phase = 0.0;
};

// Versioned JSON-backed experiment description; flags mirror these keys.
struct ExperimentConfig {
  int schema_version = 1;

  // grids (slow box; the fast box follows from each eps)
  int n1 = 64, n2 = 64, n3_slow = 32, n3_fast = 32;
  double L1 = 2.0 * 3.14159265358979323846;
  double L2 = 2.0 * 3.14159265358979323846;
  double L3_slow = 2.0 * 3.14159265358979323846;

  // sweep
  std::vector<int> eps_m = {4, 8, 16, 32};  // eps = 1/m ladder
  double T = 1.0;
  double dt = 2e-3;
  int sample_every = 4;

  // initial data
  std::string generator = "stream2d";  // stream2d | oscillatory | product
  std::string phi_preset = "bump";     // bump | modes | random
  std::vector<ModeSpec> phi_modes;     // used when phi_preset == "modes"
  double v_amplitude = 1.0;
  double w_amplitude = 1.0;
  int v_kmax = 2;
  int w_kmax = 2;
  std::vector<ModeSpec> f_modes, g_modes;  // product generator factors
  std::uint64_t seed = 1;

  // run control
  double lambda = 1.0;
  double ceiling_factor = 1e3;
  bool direct_solve = false;
  int threads = 1;

  std::string out_dir = "out";
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json_text(const ExperimentConfig& cfg);

// Initial data for one eps point. stream2d fills v0 (+ w0); oscillatory
// fills `fast`; product fills `product_field` (the scalar f(x_h) g(eps x3)).
struct InitialData {
  SliceState v0;
  VectorField w0_slow;
  VectorField fast;
  ScalarField product_field;
};

InitialData generate_initial_data(const ExperimentConfig& cfg,
                                  const EpsParams& ep);

// The 2D factor f of the product generator (for the lower-bound check).
ScalarField product_factor_2d(const ExperimentConfig& cfg);

struct SweepRecord {
  double eps = 0.0;
  int m = 0;
  double sup_r_h12 = 0.0;
  double terminal_r_h12 = 0.0;
  double f_press = 0.0, f_lin = 0.0, f_nonlin = 0.0, f_total = 0.0;
  double runtime_s = 0.0;  // CSV/summary only, never NDJSON
  bool blowup = false;
  bool cfl_warning = false;
  bool failed = false;
  std::string error;
};

// Full pipeline per eps (descending eps order); per-point failures are
// recorded in the record and the sweep continues.
std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg);

struct FitResult {
  double slope = 0.0;      // empirical exponent of value ~ eps^slope
  double intercept = 0.0;  // log prefactor
  double r2 = 0.0;
  int points = 0;
};

// Least squares of log(value) against log(eps) over usable records.
FitResult fit_scaling(const std::vector<double>& eps,
                      const std::vector<double>& values);
FitResult fit_scaling(const std::vector<SweepRecord>& recs,
                      double SweepRecord::* field);

struct ReportPaths {
  std::string csv;      // sweep.csv
  std::string ndjson;   // sweep.ndjson (byte-stable across identical runs)
  std::string forcing;  // forcing.ndjson (one record per component per eps)
  std::string summary;  // summary.txt
};

ReportPaths default_report_paths(const std::string& out_dir);
void emit_report(const std::vector<SweepRecord>& recs,
                 const ExperimentConfig& cfg, const ReportPaths& paths);

// The NDJSON serialization used by emit_report, exposed for determinism
// checks: one line per record, runtime excluded.
std::string sweep_record_json(const SweepRecord& rec);

std::string normrecord_json(const NormRecord& rec);

}  // namespace slowflow
