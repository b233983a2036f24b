#pragma once

// Closed-form steady-state transmissions, noise photon number and transistor gain.

#include <cmath>
#include <limits>
#include <optional>

#include "sqnr/device.hpp"
#include "sqnr/errors.hpp"

namespace sqnr {

struct TransmissionSet {
  std::optional<double> T12;  // noise-inclusive; needs alpha_in != 0
  double T21 = 0.0;
  double T23 = 0.0;
  double T12_sv = 0.0;
  double N_noise = 0.0;
  double eta_db = 0.0;  // from T12_sv; +inf when T21 underflows
};

inline constexpr double kT21Floor = 1e-300;

// Through-port and drop-port transmission of a two-mode system with coupling J_x
// and second-mode detuning Delta_x.
struct ChannelTransmission {
  double through = 0.0;
  double drop = 0.0;
};

inline ChannelTransmission channel_transmission(const DeviceParams& p, double delta_x, double j_x) {
  const double ka = p.kappa_a, kb = p.kappa_b, k1 = p.kappa_ex1, k2 = p.kappa_ex2, da = p.Delta_a;
  const double j2 = j_x * j_x;
  // G = J^4 + 2 J^2 (ka kb - Da Dx) + (ka^2 + Da^2)(kb^2 + Dx^2) and the through
  // numerator J^4 + 2 zeta J^2 + Lambda, each written as a sum of two squares; the
  // expanded numerator cancels catastrophically near critical coupling.
  const double g_re = j2 + ka * kb - da * delta_x, g_im = ka * delta_x + da * kb;
  const double kc = ka - 2.0 * k1;
  const double n_re = j2 + kc * kb - da * delta_x, n_im = kc * delta_x + da * kb;
  const double g = g_re * g_re + g_im * g_im;
  if (!(g > 0.0)) throw NumericalError("channel_transmission: vanishing denominator");
  return {(n_re * n_re + n_im * n_im) / g, 4.0 * k1 * k2 * j2 / g};
}

inline double noise_photons(const DeviceParams& p, const SqueezeFrame& f) {
  if (f.r_p == 0.0 || p.J == 0.0) return 0.0;
  const double ka = p.kappa_a, kb = p.kappa_b, kab = ka + kb;
  const double dab = p.Delta_a - f.Delta_b_s;
  const double js2 = f.J_s * f.J_s;
  const double q = js2 * kab * kab + ka * kb * (kab * kab + dab * dab);
  return kb * kab * f.N_p * js2 / q;
}

inline double noise_photons(const DeviceParams& p) { return noise_photons(p, squeeze_frame(p)); }

inline double isolation_ratio_db(double t12_sv, double t21) {
  if (t21 < kT21Floor) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(t12_sv / t21);
}

inline TransmissionSet transmissions(const DeviceParams& p) {
  const SqueezeFrame f = squeeze_frame(p);
  TransmissionSet t;
  const auto fw = channel_transmission(p, f.Delta_b_s, f.J_s);
  const auto bw = channel_transmission(p, p.Delta_b, p.J);
  t.T12_sv = fw.through;
  t.T21 = bw.through;
  t.T23 = bw.drop;
  t.N_noise = noise_photons(p, f);
  const double flux = std::norm(p.alpha_in);
  if (flux > 0.0) t.T12 = t.T12_sv + 2.0 * p.kappa_ex1 * t.N_noise / flux;
  t.eta_db = isolation_ratio_db(t.T12_sv, t.T21);
  return t;
}

// Transistor gain in the reduced form valid for omega_p = 2 omega_in,
// kappa_p = 2 kappa_a and kappa_ex2_p = 2 kappa_ex2. `photon_flux` is
// |alpha_in|^2 / kappa_a. "Off" is the same device with Omega_p = 0.
inline double transistor_delta_t(const DeviceParams& p, double photon_flux) {
  DeviceParams on = p;
  on.alpha_in = std::sqrt(photon_flux);
  DeviceParams off = on.unpumped();
  return *transmissions(on).T12 - *transmissions(off).T12;
}

inline double transistor_gain(const DeviceParams& p, const PumpSpec& pump, double photon_flux) {
  pump.validate();
  if (!(photon_flux > 0.0)) throw InvalidArgument("transistor_gain: photon flux must be > 0");
  if (p.Omega_p == 0.0) return 0.0;
  const double g = pump.g / pump.kappa_a;
  const double dT = transistor_delta_t(p, photon_flux);
  return 2.0 * p.kappa_ex2 * g * g * photon_flux * dT / (p.kappa_a * p.kappa_a * p.Omega_p * p.Omega_p);
}

// G = (P_in / P_p) dT with the physical pump spec; omega_in in rad/s.
inline double transistor_gain_general(const DeviceParams& p, const PumpSpec& pump, double photon_flux,
                                      double omega_in) {
  pump.validate();
  if (!(photon_flux > 0.0)) throw InvalidArgument("transistor_gain_general: photon flux must be > 0");
  if (p.Omega_p == 0.0) return 0.0;
  const double flux_si = photon_flux * pump.kappa_a;  // |alpha_in|^2 in s^-1
  const double p_in = kHbar * omega_in * flux_si / (2.0 * std::numbers::pi);
  const double p_p = pump_power(p.Omega_p * pump.kappa_a, pump);
  return p_in / p_p * transistor_delta_t(p, photon_flux);
}

}  // namespace sqnr
