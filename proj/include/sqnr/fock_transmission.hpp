#pragma once

// Steady-state port transmissions from the truncated-Fock master equation, with
// a self-certifying truncation choice.

#include <algorithm>
#include <cmath>
#include <string>

#include "sqnr/device.hpp"
#include "sqnr/moments.hpp"
#include "sqnr/solvers.hpp"

namespace sqnr {

struct TruncationOptions {
  int initial_dim = 0;  // 0: pick from photon-number estimate
  int step = 4;
  int max_dim = 40;
  double rel_tol = 1e-3;
  double abs_floor = 1e-6;
};

struct FockTransmission {
  PortTransmissions ports;
  int dim = 0;            // per-mode truncation of the reported solve
  double last_change = 0.0;
  double min_eigenvalue = 0.0;
};

// ceil(4 (|alpha|^2 kappa_ex1 + sinh^2 r_p) + 6), per mode, in kappa_a units.
inline int initial_truncation(const DeviceParams& p, Direction dir, Bath bath) {
  const SqueezeFrame f = squeeze_frame(p);
  const double thermal = (dir == Direction::forward && bath == Bath::vacuum_lab) ? f.N_p : 0.0;
  const double n = 4.0 * (std::norm(p.alpha_in) / p.kappa_a * p.kappa_ex1 / p.kappa_a + thermal) + 6.0;
  return std::max(2, static_cast<int>(std::ceil(n)));
}

inline FockTransmission fock_transmission_at(const DeviceParams& p, Direction dir, Bath bath, int dim) {
  const FockSpace space = device_space(dim, dim, dir);
  const DensityMatrix rho = steady_state(device_liouvillian(p, dir, bath, space));
  const cplx mean_a = rho.expect(destroy(space, 0));
  const double n_a = rho.expect(number(space, 0)).real();
  const double n_b = rho.expect(number(space, 1)).real();
  FockTransmission out;
  out.ports = transmissions_from_moments(p, mean_a, n_a - std::norm(mean_a), n_b);
  out.dim = dim;
  out.min_eigenvalue = rho.min_eigenvalue();
  return out;
}

inline double relative_change(double a, double b, double floor) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

inline FockTransmission fock_transmissions(const DeviceParams& p, Direction dir, Bath bath,
                                           const TruncationOptions& opt = {}) {
  int n = opt.initial_dim > 0 ? opt.initial_dim : initial_truncation(p, dir, bath);
  if (n > opt.max_dim) throw NumericalError("fock_transmissions: initial truncation exceeds the cap");
  FockTransmission coarse = fock_transmission_at(p, dir, bath, n);
  for (;;) {
    const int next = n + opt.step;
    if (next > opt.max_dim)
      throw NumericalError("fock_transmissions: truncation did not converge below dimension " +
                           std::to_string(opt.max_dim));
    FockTransmission fine = fock_transmission_at(p, dir, bath, next);
    const double change = std::max(relative_change(coarse.ports.through, fine.ports.through, opt.abs_floor),
                                   relative_change(coarse.ports.drop, fine.ports.drop, opt.abs_floor));
    if (change <= opt.rel_tol) {
      fine.last_change = change;
      return fine;
    }
    coarse = std::move(fine);
    n = next;
  }
}

}  // namespace sqnr
