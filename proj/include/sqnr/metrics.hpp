#pragma once

// Device figures of merit: isolation, insertion loss, bandwidth, circulator
// fidelity, transistor gain maps.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "sqnr/analytic.hpp"
#include "sqnr/errors.hpp"
#include "sqnr/parallel.hpp"

namespace sqnr {

inline double isolation_db(double t12_sv, double t21) {
  if (!(t12_sv > 0.0)) throw InvalidArgument("isolation_db: T12_sv must be > 0");
  if (t21 < 0.0) throw InvalidArgument("isolation_db: T21 must be >= 0");
  return isolation_ratio_db(t12_sv, t21);
}

inline double insertion_loss_db(double t) {
  if (!(t > 0.0)) throw InvalidArgument("insertion_loss_db: transmission must be > 0");
  return -10.0 * std::log10(t);
}

inline double avg_insertion_loss_db(double t12, double t23) {
  if (t12 < 0.0 || t23 < 0.0 || !(t12 + t23 > 0.0))
    throw InvalidArgument("avg_insertion_loss_db: transmissions must be >= 0 with a positive sum");
  return -10.0 * std::log10(0.5 * (t12 + t23));
}

struct BandwidthResult {
  double width = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool reached = false;  // false: threshold never met around the center
};

struct BandwidthOptions {
  double grid_step = 1e-3;
  double refine_tol = 1e-5;
  bool lock_delta_b = true;  // Delta_b follows Delta_a
};

// Width of the contiguous Delta_a interval around `center` where eta >= threshold.
inline BandwidthResult bandwidth(const DeviceParams& params, double eta_threshold_db, double center,
                                 double halfwidth, const BandwidthOptions& opt = {}) {
  if (!(eta_threshold_db > 0.0)) throw InvalidArgument("bandwidth: threshold must be > 0");
  if (!(halfwidth > 0.0)) throw InvalidArgument("bandwidth: halfwidth must be > 0");
  auto eta_at = [&](double da) {
    DeviceParams p = params;
    p.Delta_a = da;
    if (opt.lock_delta_b) p.Delta_b = da;
    return transmissions(p).eta_db;
  };
  auto inside = [&](double da) { return eta_at(da) >= eta_threshold_db; };

  BandwidthResult out;
  if (!inside(center)) return out;
  out.reached = true;

  // Walk the grid outward from the center to the last point inside, then bisect.
  auto edge = [&](double dir) {
    double last_in = center;
    const long steps = static_cast<long>(std::floor(halfwidth / opt.grid_step));
    for (long k = 1; k <= steps; ++k) {
      const double x = center + dir * opt.grid_step * static_cast<double>(k);
      if (!inside(x)) {
        double lo = last_in, hi = x;  // lo inside, hi outside
        while (std::abs(hi - lo) > opt.refine_tol) {
          const double mid = 0.5 * (lo + hi);
          (inside(mid) ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
      }
      last_in = x;
    }
    return last_in;  // still inside at the scan boundary
  };
  out.lower = edge(-1.0);
  out.upper = edge(+1.0);
  out.width = out.upper - out.lower;
  return out;
}

struct CirculatorReport {
  double F = 0.0;
  double L_avg_db = 0.0;
  double T12 = 0.0, T21 = 0.0, T23 = 0.0;
};

// Rows are input ports {1, 2}; row 1 holds 1->2, row 2 holds 2->1 and 2->3. The
// ideal quasi-circulator routes 1->2 and 2->3.
inline CirculatorReport circulator_fidelity(double t12, double t21, double t23) {
  if (t12 < 0.0 || t21 < 0.0 || t23 < 0.0) throw InvalidArgument("circulator_fidelity: negative transmission");
  // columns: output ports 1, 2, 3
  Eigen::Matrix<double, 2, 3> t;
  t << 0.0, t12, 0.0,  //
      t21, 0.0, t23;
  Eigen::Matrix<double, 2, 3> ideal;
  ideal << 0.0, 1.0, 0.0,  //
      0.0, 0.0, 1.0;
  Eigen::Matrix<double, 2, 3> normalized;
  for (int i = 0; i < 2; ++i) {
    const double row = t.row(i).sum();
    if (!(row > 0.0)) throw InvalidArgument("circulator_fidelity: zero row sum");
    normalized.row(i) = t.row(i) / row;
  }
  CirculatorReport r;
  r.F = (normalized * ideal.transpose()).trace() / (ideal * ideal.transpose()).trace();
  r.L_avg_db = avg_insertion_loss_db(t12, t23);
  r.T12 = t12;
  r.T21 = t21;
  r.T23 = t23;
  return r;
}

// G over the product grid; rows follow delta_a_grid, columns photon_flux_grid.
// Delta_b tracks Delta_a.
inline Eigen::MatrixXd gain_map(const DeviceParams& params, const PumpSpec& pump,
                                const std::vector<double>& photon_flux_grid, const std::vector<double>& delta_a_grid,
                                int threads = 1) {
  if (photon_flux_grid.empty() || delta_a_grid.empty()) throw InvalidArgument("gain_map: empty grid");
  const auto rows = static_cast<Eigen::Index>(delta_a_grid.size());
  const auto cols = static_cast<Eigen::Index>(photon_flux_grid.size());
  Eigen::MatrixXd g(rows, cols);
  parallel_for(delta_a_grid.size(), threads, [&](std::size_t i) {
    DeviceParams p = params;
    p.Delta_a = delta_a_grid[i];
    p.Delta_b = delta_a_grid[i];
    for (Eigen::Index j = 0; j < cols; ++j)
      g(static_cast<Eigen::Index>(i), j) = transistor_gain(p, pump, photon_flux_grid[static_cast<std::size_t>(j)]);
  });
  return g;
}

}  // namespace sqnr
