#include "slowflow/ns2d.hpp"

#include <cmath>
#include <future>
#include <numbers>
#include <stdexcept>

#include "slowflow/fft.hpp"
#include "slowflow/norms.hpp"
#include "slowflow/spectral.hpp"

namespace slowflow {

namespace {

double max_wavenumber(const Grid& g) {
  double m = std::numbers::pi * g.n1() / g.L1();
  m = std::max(m, std::numbers::pi * g.n2() / g.L2());
  if (!g.is2d()) m = std::max(m, std::numbers::pi * g.n3() / g.L3());
  return m;
}

}  // namespace

int steps_for(double T, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("time step must be positive");
  const auto n = std::llround(T / dt);
  if (n < 1 || std::abs(double(n) * dt - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("horizon T must be an integer number of steps");
  return int(n);
}

ScalarField pressure_p0(const VectorField& v) {
  if (v.ncomp() != 2 || !v.g().is2d())
    throw std::invalid_argument("pressure_p0: expected a 2-component 2D field");
  const Grid& g = v.g();
  ScalarField rhs(v.grid(), true);  // sum_{j,k} d_j d_k (v^j v^k)
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      const ScalarField prod = multiply_dealiased(v[j], v[k]);
      for (int i1 = 0; i1 < g.n1(); ++i1)
        for (int i2 = 0; i2 < g.n2(); ++i2) {
          const double kj = j == 0 ? g.k1(i1) : g.k2(i2);
          const double kk = k == 0 ? g.k1(i1) : g.k2(i2);
          rhs.at(i1, i2, 0) += -kj * kk * prod.at(i1, i2, 0);
        }
    }
  ScalarField p(v.grid(), true);
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2) {
      const double kh2 = g.k1(i1) * g.k1(i1) + g.k2(i2) * g.k2(i2);
      if (kh2 == 0.0) continue;
      p.at(i1, i2, 0) = rhs.at(i1, i2, 0) / kh2;
    }
  return p;
}

VectorField ns2d_rhs(const VectorField& v) {
  VectorField adv = convect(v, v, {1, 2});
  return weighted_leray_project(-1.0 * adv);
}

VectorField ns2d_step(const VectorField& v, double dt, StepInfo* info) {
  if (dt <= 0.0) throw std::invalid_argument("ns2d_step: dt must be positive");
  if (info) {
    info->cfl = dt * linf_norm(v) * max_wavenumber(v.g());
    info->cfl_warning = info->cfl >= 1.0;
  }
  const std::array<double, 3> w{1.0, 1.0, 0.0};
  VectorField n0 = ns2d_rhs(v);
  VectorField pred = v;
  pred.axpy(dt, n0);
  heat_propagate_inplace(pred, dt, w);
  const VectorField n1 = ns2d_rhs(pred);
  heat_propagate_inplace(n0, dt, w);
  VectorField out = v;
  heat_propagate_inplace(out, dt, w);
  out.axpy(0.5 * dt, n0);
  out.axpy(0.5 * dt, n1);
  out.enforce_zero_mean();
  if (!out.finite()) throw NumericalError("ns2d_step: NaN detected");
  return out;
}

double grad_h_sq(const VectorField& v) {
  const double n = hs_norm(v, 1.0, NormAxes::horizontal);
  return n * n;
}

double slice_divergence_defect(const SliceState& s) {
  double mag = 0.0;
  for (const auto& v : s.v) mag = std::max(mag, v.max_abs_coeff());
  if (mag == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& v : s.v)
    worst = std::max(worst, divergence(v).max_abs_coeff());
  return worst / mag;
}

SliceTrajectory solve_slice_family(const SliceState& v0, double T, double dt,
                                   int sample_every, int threads) {
  const int nsteps = steps_for(T, dt);
  if (sample_every < 1) sample_every = 1;
  const int nslices = v0.count();
  if (slice_divergence_defect(v0) > 1e-10)
    throw std::invalid_argument("solve_slice_family: slice not divergence-free");

  std::vector<int> sample_steps;
  for (int k = 0; k <= nsteps; ++k)
    if (k % sample_every == 0 || k == nsteps) sample_steps.push_back(k);
  const int nsamp = int(sample_steps.size());

  SliceTrajectory traj;
  traj.times.resize(nsamp);
  traj.dissipation.assign(nsamp, std::vector<double>(nslices, 0.0));
  traj.states.assign(nsamp, SliceState{0.0, v0.hgrid, v0.y3, {}});
  for (int i = 0; i < nsamp; ++i) {
    traj.times[i] = v0.t + sample_steps[i] * dt;
    traj.states[i].t = traj.times[i];
    traj.states[i].v.resize(nslices);
  }

  auto run_slice = [&](int s) {
    VectorField v = v0.v[s];
    double diss = 0.0;
    double d_prev = grad_h_sq(v);
    int isamp = 0;
    for (int k = 0; k <= nsteps; ++k) {
      if (k == sample_steps[isamp]) {
        traj.states[isamp].v[s] = v;
        traj.dissipation[isamp][s] = diss;
        ++isamp;
      }
      if (k == nsteps) break;
      try {
        v = ns2d_step(v, dt);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (slice " +
                             std::to_string(s) + ")");
      }
      const double d_next = grad_h_sq(v);
      diss += 0.5 * dt * (d_prev + d_next);
      d_prev = d_next;
    }
  };

  if (threads <= 1 || nslices <= 1) {
    for (int s = 0; s < nslices; ++s) run_slice(s);
  } else {
    std::vector<std::future<void>> futs;
    std::atomic<int> next{0};
    const int nw = std::min(threads, nslices);
    for (int w = 0; w < nw; ++w)
      futs.push_back(std::async(std::launch::async, [&] {
        detail::enable_ftz();
        for (int s = next.fetch_add(1); s < nslices; s = next.fetch_add(1))
          run_slice(s);
      }));
    for (auto& f : futs) f.get();
  }
  return traj;
}

SliceState SliceTrajectory::at(double t) const {
  if (times.empty()) throw std::invalid_argument("SliceTrajectory::at: empty");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  std::size_t hi = 1;
  while (times[hi] < t) ++hi;
  const double t0 = times[hi - 1], t1 = times[hi];
  if (t1 - t0 <= 0.0) return states[hi];
  const double a = (t - t0) / (t1 - t0);
  SliceState out = states[hi - 1];
  out.t = t;
  for (int s = 0; s < out.count(); ++s)
    out.v[s] = (1.0 - a) * states[hi - 1].v[s] + a * states[hi].v[s];
  return out;
}

std::vector<EnergyRecord> energy_report(const SliceTrajectory& traj) {
  if (traj.times.empty())
    throw std::invalid_argument("energy_report: empty trajectory");
  std::vector<EnergyRecord> out;
  const int nslices = traj.states.front().count();
  for (int s = 0; s < nslices; ++s) {
    const double e0 = std::pow(l2_norm(traj.states.front().v[s]), 2);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const double e = std::pow(l2_norm(traj.states[i].v[s]), 2);
      const double d = traj.dissipation[i][s];
      const double defect = e0 > 0.0 ? std::abs(e + 2.0 * d - e0) / e0 : 0.0;
      out.push_back(EnergyRecord{s, traj.states.front().y3.empty()
                                        ? 0.0
                                        : traj.states.front().y3[s],
                                 traj.times[i], e, d, defect});
    }
  }
  return out;
}

}  // namespace slowflow
