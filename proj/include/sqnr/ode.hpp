#pragma once

// Adaptive Dormand-Prince 5(4) integrator for complex vector ODEs.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sqnr/errors.hpp"
#include "sqnr/fock.hpp"

namespace sqnr {

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0 picks one automatically
  double max_step = 0.0;      // 0 means unbounded
  long max_steps = 50'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

namespace detail {

// Butcher tableau of Dormand & Prince (1980).
struct DopriTableau {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  // b - b_hat, the embedded error weights
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

inline double error_norm(const CVector& err, const CVector& y0, const CVector& y1, const OdeOptions& opt) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double scale = opt.atol + opt.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    worst = std::max(worst, std::abs(err[i]) / scale);
  }
  return worst;
}

}  // namespace detail

// Integrates dy/dt = rhs(t, y) from t0 and calls observe(t, y) at every time in
// `outputs` (which must be non-decreasing and >= t0). Steps are clipped to land
// exactly on output times.
template <class Rhs, class Observer>
OdeStats integrate_dopri5(Rhs&& rhs, double t0, CVector y, std::span<const double> outputs, Observer&& observe,
                          const OdeOptions& opt = {}) {
  using T = detail::DopriTableau;
  OdeStats stats;
  if (outputs.empty()) return stats;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i] < t0 || (i > 0 && outputs[i] < outputs[i - 1]))
      throw InvalidArgument("integrate_dopri5: output times must be non-decreasing and >= t0");
  }

  double t = t0;
  CVector k1 = rhs(t, y);
  double h = opt.initial_step;
  if (h <= 0.0) {
    const double yn = std::max(y.cwiseAbs().maxCoeff(), opt.atol);
    const double fn = std::max(k1.cwiseAbs().maxCoeff(), 1e-12);
    h = 0.01 * yn / fn;
    h = std::clamp(h, 1e-8, 1.0);
  }

  std::size_t next = 0;
  while (next < outputs.size() && outputs[next] <= t) observe(outputs[next++], y);

  CVector k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
  while (next < outputs.size()) {
    const double target = outputs[next];
    const double h_natural = h;
    if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
    bool lands = false;
    if (t + h >= target) {
      h = target - t;
      lands = true;
    }
    const double min_step = 1e-13 * std::max(1.0, std::abs(t));
    if (lands && h < min_step) {
      // Output time within rounding of the current time.
      t = target;
      h = h_natural;
      while (next < outputs.size() && outputs[next] <= t) observe(outputs[next++], y);
      continue;
    }
    if (h < min_step) throw NumericalError("integrate_dopri5: step size underflow at t = " + std::to_string(t));
    if (stats.accepted + stats.rejected > opt.max_steps) throw NumericalError("integrate_dopri5: too many steps");

    ytmp = y + h * (T::a21 * k1);
    k2 = rhs(t + T::c2 * h, ytmp);
    ytmp = y + h * (T::a31 * k1 + T::a32 * k2);
    k3 = rhs(t + T::c3 * h, ytmp);
    ytmp = y + h * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3);
    k4 = rhs(t + T::c4 * h, ytmp);
    ytmp = y + h * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4);
    k5 = rhs(t + T::c5 * h, ytmp);
    ytmp = y + h * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5);
    k6 = rhs(t + h, ytmp);
    ynew = y + h * (T::b1 * k1 + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 + T::b6 * k6);
    k7 = rhs(t + h, ynew);
    err = h * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);

    const double en = detail::error_norm(err, y, ynew, opt);
    if (!std::isfinite(en)) throw NumericalError("integrate_dopri5: non-finite state");
    if (en <= 1.0) {
      t = lands ? target : t + h;
      y.swap(ynew);
      k1.swap(k7);
      ++stats.accepted;
      while (next < outputs.size() && outputs[next] <= t) observe(outputs[next++], y);
    } else {
      ++stats.rejected;
    }
    const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    // A step clipped to an output time says nothing about the natural step size.
    h = (lands && en <= 1.0) ? std::max(h_natural, h * factor) : h * factor;
  }
  return stats;
}

}  // namespace sqnr
