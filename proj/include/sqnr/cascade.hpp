#pragma once

// Cascaded-system propagation of a single-photon pulse through the device.
//
// A source resonator d, prepared in |1>, leaks into the input waveguide at the
// Gaussian rate kappa_ex0(t) and unidirectionally drives mode a. Port fluxes are
// integrated alongside the master equation, so photon bookkeeping is exact to
// the integrator tolerance.

#include <array>
#include <cmath>
#include <future>
#include <string>
#include <vector>

#include "sqnr/device.hpp"
#include "sqnr/errors.hpp"
#include "sqnr/fock.hpp"
#include "sqnr/metrics.hpp"
#include "sqnr/ode.hpp"

namespace sqnr {

struct PulseSpec {
  double tau_p = 6.0;
  double tau_d = 24.0;
  double t_end = 54.0;
  double peak_rate = 1.0;  // kappa_a
  std::array<int, 3> dims{2, 3, 3};  // source, a, b
  double sample_step = 0.1;

  // tau_d = 4 tau_p, t_end = 9 tau_p
  static PulseSpec with_duration(double tau_p) {
    PulseSpec s;
    s.tau_p = tau_p;
    s.tau_d = 4.0 * tau_p;
    s.t_end = 9.0 * tau_p;
    return s;
  }

  void validate() const {
    if (!(tau_p > 0.0)) throw InvalidArgument("PulseSpec: tau_p must be > 0");
    if (!(peak_rate >= 0.0)) throw InvalidArgument("PulseSpec: peak_rate must be >= 0");
    if (t_end < tau_d + 4.0 * tau_p) throw InvalidArgument("PulseSpec: t_end must be >= tau_d + 4 tau_p");
    for (int d : dims)
      if (d < 2) throw InvalidArgument("PulseSpec: every truncation must be >= 2");
    if (!(sample_step > 0.0)) throw InvalidArgument("PulseSpec: sample_step must be > 0");
  }
};

inline double kappa_ex0(double t, const PulseSpec& s) {
  const double x = t - s.tau_d;
  return s.peak_rate * std::exp(-x * x / (2.0 * s.tau_p * s.tau_p));
}

struct PulseResult {
  std::vector<double> t_grid;
  std::vector<double> flux_in;    // emitted by the source, 2 kappa_ex0 <d^+d>
  std::vector<double> flux_out;   // through port (2 forward, 1 backward)
  std::vector<double> flux_drop;  // 2 kappa_ex2 <b^+b>
  double emitted = 0.0;
  double through = 0.0;
  double drop = 0.0;
  double leak_intrinsic = 0.0;
  double residual = 0.0;  // photons left in source + device at t_end
  double T_integrated = 0.0;     // through / emitted
  double T_drop = 0.0;           // drop / emitted
  double T_through_ideal = 0.0;  // through / 1 photon
  double conservation_error = 0.0;
  bool noise_unreliable = false;
};

struct PulseOptions {
  OdeOptions ode{};
  double conservation_tol = 1e-4;
};

namespace detail {

struct CascadeModel {
  FockSpace space;
  Liouvillian generator;
  CVector w_nd, w_na, w_nb, w_da;  // expectation rows
};

inline CascadeModel build_cascade(const DeviceParams& p, const PulseSpec& spec, Direction dir, bool sv_cancelled) {
  const SqueezeFrame f = squeeze_frame(p);
  const ModeCoupling c = coupling_for(p, f, dir);
  FockSpace space({spec.dims[0], spec.dims[1], spec.dims[2]},
                  {"d", "a", dir == Direction::forward ? "b_s" : "b"});
  const auto d = destroy(space, 0);
  const auto a = destroy(space, 1);
  const auto b = destroy(space, 2);
  const auto ad = a.dag(), bd = b.dag();

  const FockOperator h = p.Delta_a * (ad * a) + c.Delta_b * (bd * b) + c.J * (ad * b + bd * a);
  std::vector<Dissipator> diss;
  diss.emplace_back(std::sqrt(p.kappa_a) * a);
  diss.emplace_back(std::sqrt(p.kappa_b) * b);
  if (dir == Direction::forward && !sv_cancelled) {
    auto noise = squeezed_bath(b, p.kappa_b, f.N_p, f.M_p);
    diss.insert(diss.end(), noise.begin(), noise.end());
  }
  Liouvillian base = build_liouvillian(h, diss);

  const PulseSpec s = spec;
  TimeDependentPart source{[s](double t) { return kappa_ex0(t, s); },
                           super::dissipator(d.matrix(), DissipatorKind::standard)};

  // rho -> [a^+, d rho] + [rho d^+, a]
  const CMatrix& dm = d.matrix();
  const CMatrix am = a.matrix();
  const CMatrix adm = am.adjoint(), ddm = dm.adjoint();
  SparseSuper cross = super::pre(adm * dm) - super::prepost(dm, adm) + super::post(ddm * am) - super::prepost(am, ddm);
  const double k1 = p.kappa_ex1;
  TimeDependentPart coupling{[s, k1](double t) { return 2.0 * std::sqrt(kappa_ex0(t, s) * k1); }, std::move(cross)};

  Liouvillian full = base.with_part(std::move(source)).with_part(std::move(coupling));
  return {space, std::move(full), super::expectation_row((dm.adjoint() * dm).eval()),
          super::expectation_row((adm * am).eval()), super::expectation_row((b.dag() * b).matrix()),
          super::expectation_row((ddm * am).eval())};
}

}  // namespace detail

inline PulseResult run_pulse(const DeviceParams& p, const PulseSpec& spec, Direction dir, bool sv_cancelled,
                             const PulseOptions& opt = {}) {
  p.validate();
  spec.validate();
  const detail::CascadeModel model = detail::build_cascade(p, spec, dir, sv_cancelled);
  const int dim = model.space.total_dim();
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;

  struct Fluxes {
    double emitted, through, drop, leak;
  };
  auto fluxes = [&](double t, const CVector& y) {
    const auto rho = y.head(n);
    const double k0 = kappa_ex0(t, spec);
    const double nd = model.w_nd.transpose().dot(rho).real();
    const double na = model.w_na.transpose().dot(rho).real();
    const double nb = model.w_nb.transpose().dot(rho).real();
    const double da = model.w_da.transpose().dot(rho).real();  // Re <d^+ a>
    Fluxes f;
    f.emitted = 2.0 * k0 * nd;
    f.through = 2.0 * k0 * nd - 4.0 * std::sqrt(k0 * p.kappa_ex1) * da + 2.0 * p.kappa_ex1 * na;
    f.drop = 2.0 * p.kappa_ex2 * nb;
    f.leak = 2.0 * (p.kappa_a - p.kappa_ex1) * na + 2.0 * (p.kappa_b - p.kappa_ex2) * nb;
    return f;
  };

  // State: vec(rho) followed by the four running integrals.
  auto rhs = [&](double t, const CVector& y) {
    CVector dy(n + 4);
    dy.head(n) = model.generator.apply(t, CVector(y.head(n)));
    const Fluxes f = fluxes(t, y);
    dy[n] = f.emitted;
    dy[n + 1] = f.through;
    dy[n + 2] = f.drop;
    dy[n + 3] = f.leak;
    return dy;
  };

  CVector y0 = CVector::Zero(n + 4);
  {
    std::vector<int> occ{1, 0, 0};
    const int i = model.space.basis_index(occ);
    y0[static_cast<Eigen::Index>(i) * dim + i] = 1.0;
  }

  PulseResult r;
  const auto samples = static_cast<std::size_t>(std::floor(spec.t_end / spec.sample_step + 1e-9)) + 1;
  for (std::size_t k = 0; k < samples; ++k) r.t_grid.push_back(std::min(spec.t_end, spec.sample_step * k));
  if (r.t_grid.back() < spec.t_end) r.t_grid.push_back(spec.t_end);

  CVector final_state;
  integrate_dopri5(rhs, 0.0, y0, r.t_grid,
                   [&](double t, const CVector& y) {
                     const Fluxes f = fluxes(t, y);
                     r.flux_in.push_back(f.emitted);
                     r.flux_out.push_back(f.through);
                     r.flux_drop.push_back(f.drop);
                     final_state = y;
                   },
                   opt.ode);

  const auto rho = final_state.head(n);
  r.emitted = final_state[n].real();
  r.through = final_state[n + 1].real();
  r.drop = final_state[n + 2].real();
  r.leak_intrinsic = final_state[n + 3].real();
  r.residual = (model.w_nd + model.w_na + model.w_nb).transpose().dot(rho).real();
  r.T_integrated = r.emitted > 0.0 ? r.through / r.emitted : 0.0;
  r.T_drop = r.emitted > 0.0 ? r.drop / r.emitted : 0.0;
  r.T_through_ideal = r.through;
  r.conservation_error = std::abs(r.through + r.drop + r.leak_intrinsic + r.residual - 1.0);
  r.noise_unreliable = dir == Direction::forward && !sv_cancelled && squeeze_frame(p).r_p > 0.0;
  if (!r.noise_unreliable && r.conservation_error > opt.conservation_tol)
    throw NumericalError("run_pulse: photon conservation violated by " + std::to_string(r.conservation_error));
  return r;
}

struct PulseCirculator {
  PulseResult forward;
  PulseResult backward;
  CirculatorReport report;
};

// Forward (port 1) and backward (port 2) single-photon runs and the resulting
// quasi-circulator report.
inline PulseCirculator run_pulse_pair(const DeviceParams& p, const PulseSpec& spec, bool sv_cancelled,
                                      int threads = 1, const PulseOptions& opt = {}) {
  PulseCirculator out;
  if (threads > 1) {
    auto fw = std::async(std::launch::async, [&] { return run_pulse(p, spec, Direction::forward, sv_cancelled, opt); });
    out.backward = run_pulse(p, spec, Direction::backward, sv_cancelled, opt);
    out.forward = fw.get();
  } else {
    out.forward = run_pulse(p, spec, Direction::forward, sv_cancelled, opt);
    out.backward = run_pulse(p, spec, Direction::backward, sv_cancelled, opt);
  }
  out.report = circulator_fidelity(out.forward.T_integrated, out.backward.T_integrated, out.backward.T_drop);
  return out;
}

}  // namespace sqnr
