#pragma once

// CLI scenarios. Each command writes CSV (or, for validate, a text report) to
// `data` and human-readable notes to `report`, and returns the process exit code.
// Configuration problems throw ConfigError; solver problems throw NumericalError.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "sqnr/analytic.hpp"
#include "sqnr/cascade.hpp"
#include "sqnr/config.hpp"
#include "sqnr/csv.hpp"
#include "sqnr/fock_transmission.hpp"
#include "sqnr/metrics.hpp"
#include "sqnr/moments.hpp"
#include "sqnr/parallel.hpp"

namespace sqnr {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3 };

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline const SweepSpec& require_sweep(const RunConfig& c, const char* cmd) {
  if (!c.sweep) throw ConfigError(std::string(cmd) + ": config has no sweep");
  return *c.sweep;
}

inline DeviceParams at_axis(const RunConfig& c, const SweepSpec& s, double x) {
  DeviceParams p = c.device;
  *device_field(p, s.axis) = x;
  if (s.axis == "Delta_a" && s.lock_delta_b) p.Delta_b = x;
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

inline Bath forward_bath(const RunConfig& c) { return c.sv_cancelled ? Bath::squeezed_vacuum : Bath::vacuum_lab; }

inline void note_rwa(const DeviceParams& p, std::ostream& report) {
  const SqueezeFrame f = squeeze_frame(p);
  if (f.rwa_warning)
    report << "warning: RWA margin " << format_number(f.rwa_margin) << " below " << kRwaMarginThreshold << "\n";
}

}  // namespace detail

// Steady-state spectrum over the sweep axis. Numeric columns follow the analytic
// ones when the solver is `moments` or `fock`.
inline int cmd_sweep(const RunConfig& c, int threads, std::ostream& data, std::ostream& report) {
  const SweepSpec& s = detail::require_sweep(c, "sweep");
  if (s.axis == "r_p") throw ConfigError("sweep: r_p is a squeeze-scan axis");
  if (c.solver == Solver::cascade) throw ConfigError("sweep: the cascade solver is used by the pulse command");
  if (std::norm(c.device.alpha_in) == 0.0) throw ConfigError("sweep: alpha_in must be non-zero");
  detail::note_rwa(c.device, report);

  std::vector<std::string> header{detail::lower(s.axis), "T12", "T12_sv", "T21", "T23", "eta_db"};
  if (c.solver == Solver::moments)
    for (const char* h : {"T12_mom", "T12_sv_mom", "T21_mom", "T23_mom"}) header.emplace_back(h);
  if (c.solver == Solver::fock)
    for (const char* h : {"T12_fock", "T21_fock", "T23_fock"}) header.emplace_back(h);

  const std::vector<double> grid = s.grid();
  std::vector<DeviceParams> points;
  for (double x : grid) points.push_back(detail::at_axis(c, s, x));
  std::vector<std::vector<double>> rows(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    const DeviceParams& p = points[i];
    const TransmissionSet t = transmissions(p);
    std::vector<double> row{grid[i], *t.T12, t.T12_sv, t.T21, t.T23, t.eta_db};
    if (c.solver == Solver::moments) {
      const auto fw = moment_transmissions(p, Direction::forward, true);
      const auto fs = moment_transmissions(p, Direction::forward, false);
      const auto bw = moment_transmissions(p, Direction::backward, false);
      row.insert(row.end(), {fw.through, fs.through, bw.through, bw.drop});
    } else if (c.solver == Solver::fock) {
      const auto fw = fock_transmissions(p, Direction::forward, detail::forward_bath(c));
      const auto bw = fock_transmissions(p, Direction::backward, Bath::vacuum_lab);
      row.insert(row.end(), {fw.ports.through, bw.ports.through, bw.ports.drop});
    }
    rows[i] = std::move(row);
  });

  CsvWriter w(data);
  w.header(header);
  for (const auto& r : rows) w.row(r);
  return kExitOk;
}

// Isolation and insertion loss versus r_p, with Delta_p_b = c sinh(r_p) and
// Omega_p = tanh(2 r_p) Delta_p_b.
inline int cmd_squeeze_scan(const RunConfig& c, int threads, std::ostream& data, std::ostream&) {
  const SweepSpec& s = detail::require_sweep(c, "squeeze-scan");
  if (s.axis != "r_p") throw ConfigError("squeeze-scan: sweep axis must be r_p");
  if (s.start < 0.0) throw ConfigError("squeeze-scan: r_p must be >= 0");
  double coef = 0.0;
  if (c.squeeze_rule) coef = *c.squeeze_rule;
  else if (c.preset == "NMS" || c.preset == "LN-chip") coef = 10.0;
  else if (c.preset == "MRS") coef = 30.0;
  else throw ConfigError("squeeze-scan: squeeze_rule is required for a custom preset");

  const std::vector<double> grid = s.grid();
  std::vector<std::vector<double>> rows(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    const double r = grid[i];
    DeviceParams p = c.device;
    p.Delta_p_b = coef * std::sinh(r);
    p.Omega_p = beta_from_r(r) * p.Delta_p_b;
    const TransmissionSet t = transmissions(p);
    rows[i] = {r, t.eta_db, insertion_loss_db(t.T12_sv)};
  });

  CsvWriter w(data);
  w.header({"r_p", "eta_db", "L_db"});
  for (const auto& r : rows) w.row(r);
  return kExitOk;
}

// Gain map over Delta_a (sweep axis, Delta_b locked) and log-spaced photon flux.
inline int cmd_transistor(const RunConfig& c, int threads, std::ostream& data, std::ostream&) {
  std::vector<double> deltas{c.device.Delta_a};
  if (c.sweep) {
    if (c.sweep->axis != "Delta_a") throw ConfigError("transistor: sweep axis must be Delta_a");
    deltas = c.sweep->grid();
  }
  const std::vector<double> flux = c.transistor.flux_grid();
  const Eigen::MatrixXd g = gain_map(c.device, c.pump, flux, deltas, threads);

  CsvWriter w(data);
  w.header({"delta_a", "photon_flux", "gain"});
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      w.row({deltas[static_cast<std::size_t>(i)], flux[static_cast<std::size_t>(j)], g(i, j)});
  return kExitOk;
}

// Single-photon pulse in both directions; flux time series to `data`, integrated
// transmissions and circulator figures to `report`.
inline int cmd_pulse(const RunConfig& c, int threads, std::ostream& data, std::ostream& report) {
  const PulseCirculator pc = run_pulse_pair(c.device, c.pulse, c.sv_cancelled, threads);
  const PulseResult& fw = pc.forward;
  const PulseResult& bw = pc.backward;

  CsvWriter w(data);
  w.header({"t", "flux_in_fw", "flux_out_fw", "flux_drop_fw", "flux_in_bw", "flux_out_bw", "flux_drop_bw"});
  for (std::size_t k = 0; k < fw.t_grid.size(); ++k)
    w.row({fw.t_grid[k], fw.flux_in[k], fw.flux_out[k], fw.flux_drop[k], bw.flux_in[k], bw.flux_out[k],
           bw.flux_drop[k]});

  report << "T12=" << format_number(pc.report.T12) << "\n"
         << "T21=" << format_number(pc.report.T21) << "\n"
         << "T23=" << format_number(pc.report.T23) << "\n"
         << "F=" << format_number(pc.report.F) << "\n"
         << "L_avg_db=" << format_number(pc.report.L_avg_db) << "\n"
         << "conservation_fw=" << format_number(fw.conservation_error) << "\n"
         << "conservation_bw=" << format_number(bw.conservation_error) << "\n";
  if (fw.noise_unreliable)
    report << "warning: forward run without squeezed-vacuum cancellation; through flux includes "
              "squeezed-frame noise and photon bookkeeping is not checked\n";
  return kExitOk;
}

// Deviation used by validate: |num - ana| / max(|ana|, 1e-6).
inline double validation_deviation(double numeric, double analytic) {
  return std::abs(numeric - analytic) / std::max(std::abs(analytic), 1e-6);
}

struct ValidationReport {
  double moment_dev = 0.0;
  double fock_dev = 0.0;
  int fock_dim_forward = 0;
  int fock_dim_backward = 0;
  bool moment_pass = false;
  bool fock_pass = false;
  bool pass() const { return moment_pass && fock_pass; }
};

inline ValidationReport run_validation(const RunConfig& c, int threads) {
  const DeviceParams& p = c.device;
  if (std::norm(p.alpha_in) == 0.0) throw ConfigError("validate: alpha_in must be non-zero");
  const TransmissionSet t = transmissions(p);
  ValidationReport r;

  const auto m_fw = moment_transmissions(p, Direction::forward, true);
  const auto m_sv = moment_transmissions(p, Direction::forward, false);
  const auto m_bw = moment_transmissions(p, Direction::backward, false);
  r.moment_dev = std::max({validation_deviation(m_fw.through, *t.T12), validation_deviation(m_sv.through, t.T12_sv),
                           validation_deviation(m_bw.through, t.T21), validation_deviation(m_bw.drop, t.T23)});

  FockTransmission f_fw, f_bw;
  parallel_for(2, threads, [&](std::size_t k) {
    if (k == 0) f_fw = fock_transmissions(p, Direction::forward, detail::forward_bath(c));
    else f_bw = fock_transmissions(p, Direction::backward, Bath::vacuum_lab);
  });
  const double t12_ref = c.sv_cancelled ? t.T12_sv : *t.T12;
  r.fock_dev = std::max({validation_deviation(f_fw.ports.through, t12_ref), validation_deviation(f_bw.ports.through, t.T21),
                         validation_deviation(f_bw.ports.drop, t.T23)});
  r.fock_dim_forward = f_fw.dim;
  r.fock_dim_backward = f_bw.dim;
  r.moment_pass = r.moment_dev <= c.validate.moment_tol;
  r.fock_pass = r.fock_dev <= c.validate.fock_tol;
  return r;
}

inline int cmd_validate(const RunConfig& c, int threads, std::ostream& data, std::ostream& report) {
  detail::note_rwa(c.device, report);
  const ValidationReport r = run_validation(c, threads);
  data << "analytic-vs-moments max_dev=" << format_number(r.moment_dev)
       << " tol=" << format_number(c.validate.moment_tol) << (r.moment_pass ? " PASS" : " FAIL") << "\n";
  data << "analytic-vs-fock max_dev=" << format_number(r.fock_dev) << " tol=" << format_number(c.validate.fock_tol)
       << " dims=" << r.fock_dim_forward << "/" << r.fock_dim_backward << (r.fock_pass ? " PASS" : " FAIL") << "\n";
  return r.pass() ? kExitOk : kExitNumerical;
}

}  // namespace sqnr
