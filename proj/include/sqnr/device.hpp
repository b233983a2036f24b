#pragma once

// Two-resonator device: parameters, squeezed frame, Hamiltonians, baths, pump mapping.
//
// Internal units: kappa_a = 1. Rates, detunings and couplings are in units of
// kappa_a, times in kappa_a^-1, alpha_in in sqrt(kappa_a). Only PumpSpec uses SI.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "sqnr/errors.hpp"
#include "sqnr/fock.hpp"

namespace sqnr {

enum class Direction { forward, backward };

inline const char* to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

struct DeviceParams {
  double kappa_a = 1.0;
  double kappa_b = 1.0;
  double kappa_ex1 = 0.99;
  double kappa_ex2 = 0.99;
  double J = 0.99;
  double Omega_p = 0.0;
  double theta_p = 0.0;
  double Delta_p_b = 10.3;  // omega_b - omega_p / 2
  double Delta_a = 0.0;     // omega_a - omega_in
  double Delta_b = 0.0;     // omega_b - omega_in
  cplx alpha_in = 0.0;

  void validate() const {
    const double rates[] = {kappa_a, kappa_b, kappa_ex1, kappa_ex2, J, Omega_p};
    for (double r : rates)
      if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("DeviceParams: rates must be finite and >= 0");
    if (kappa_ex1 > kappa_a) throw InvalidArgument("DeviceParams: kappa_ex1 exceeds kappa_a");
    if (kappa_ex2 > kappa_b) throw InvalidArgument("DeviceParams: kappa_ex2 exceeds kappa_b");
    if (!std::isfinite(theta_p) || !std::isfinite(Delta_p_b) || !std::isfinite(Delta_a) || !std::isfinite(Delta_b) ||
        !std::isfinite(alpha_in.real()) || !std::isfinite(alpha_in.imag()))
      throw InvalidArgument("DeviceParams: non-finite parameter");
  }

  // Same device with the pump switched off.
  DeviceParams unpumped() const {
    DeviceParams p = *this;
    p.Omega_p = 0.0;
    return p;
  }
};

struct SqueezeFrame {
  double beta = 0.0;
  double r_p = 0.0;
  double J_s = 0.0;
  double Delta_p_bs = 0.0;  // Delta_p_b sqrt(1 - beta^2)
  double Delta_in = 0.0;    // omega_in - omega_p / 2
  double Delta_p_a = 0.0;   // omega_a - omega_p / 2
  double Delta_b_s = 0.0;   // squeezed-mode detuning in the signal frame
  double N_p = 0.0;
  cplx M_p = 0.0;
  double rwa_margin = 0.0;
  bool rwa_warning = false;
};

inline constexpr double kRwaMarginThreshold = 10.0;

inline SqueezeFrame squeeze_frame(const DeviceParams& p) {
  p.validate();
  if (p.Omega_p > 0.0 && !(p.Delta_p_b > 0.0))
    throw InvalidArgument("squeeze_frame: pumping requires Delta_p_b > 0");
  if (p.Delta_p_b < 0.0) throw InvalidArgument("squeeze_frame: Delta_p_b must be >= 0");

  SqueezeFrame f;
  f.beta = p.Omega_p > 0.0 ? p.Omega_p / p.Delta_p_b : 0.0;
  if (f.beta >= 1.0)
    throw DomainError("squeeze_frame: beta = Omega_p / Delta_p_b = " + std::to_string(f.beta) +
                      " >= 1 (parametric instability)");
  f.r_p = 0.25 * std::log((1.0 + f.beta) / (1.0 - f.beta));
  const double ch = std::cosh(f.r_p), sh = std::sinh(f.r_p);
  f.J_s = ch * p.J;
  f.Delta_p_bs = p.Delta_p_b * std::sqrt(1.0 - f.beta * f.beta);
  f.Delta_in = p.Delta_p_b - p.Delta_b;
  f.Delta_p_a = p.Delta_a + f.Delta_in;
  // Delta_p_bs - Delta_in, written so that beta = 0 returns Delta_b bit for bit.
  f.Delta_b_s = p.Delta_b - p.Delta_p_b * f.beta * f.beta / (1.0 + std::sqrt(1.0 - f.beta * f.beta));
  f.N_p = sh * sh;
  f.M_p = std::polar(ch * sh, p.theta_p);
  const double coupling = sh * p.J;
  f.rwa_margin = coupling > 0.0 ? (f.Delta_p_a + f.Delta_p_bs) / coupling : std::numeric_limits<double>::infinity();
  f.rwa_warning = f.rwa_margin < kRwaMarginThreshold;
  return f;
}

// beta as a function of the squeezing parameter: tanh(2 r).
inline double beta_from_r(double r_p) { return std::tanh(2.0 * r_p); }

// Effective coupling and squeezed-mode detuning seen by a signal in a direction.
struct ModeCoupling {
  double Delta_b;
  double J;
};

inline ModeCoupling coupling_for(const DeviceParams& p, const SqueezeFrame& f, Direction dir) {
  return dir == Direction::forward ? ModeCoupling{f.Delta_b_s, f.J_s} : ModeCoupling{p.Delta_b, p.J};
}

// ---------------------------------------------------------------------------
// Hamiltonians and baths on a two-mode space (a, b) or (a, b_s).

namespace detail {

inline void require_two_modes(const FockSpace& space) {
  if (space.num_modes() != 2) throw InvalidArgument("device Hamiltonian: space must have exactly two modes (a, b)");
}

inline FockOperator two_mode_hamiltonian(const DeviceParams& p, double delta_b, double coupling,
                                         const FockSpace& space, int mode_a, int mode_b) {
  const auto a = destroy(space, mode_a);
  const auto b = destroy(space, mode_b);
  const auto ad = a.dag(), bd = b.dag();
  const cplx i(0.0, 1.0);
  const double s = std::sqrt(2.0 * p.kappa_ex1);
  FockOperator h = p.Delta_a * (ad * a);
  h += i * s * (p.alpha_in * ad - std::conj(p.alpha_in) * a);
  h += delta_b * (bd * b);
  h += coupling * (ad * b + bd * a);
  return h;
}

}  // namespace detail

// Forward Hamiltonian in the squeezed picture, signal frame. Modes: (a, b_s).
inline FockOperator hamiltonian_forward_squeezed(const DeviceParams& p, const SqueezeFrame& f,
                                                 const FockSpace& space) {
  detail::require_two_modes(space);
  return detail::two_mode_hamiltonian(p, f.Delta_b_s, f.J_s, space, 0, 1);
}

// Backward Hamiltonian. Modes: (a, b).
inline FockOperator hamiltonian_backward(const DeviceParams& p, const FockSpace& space) {
  detail::require_two_modes(space);
  return detail::two_mode_hamiltonian(p, p.Delta_b, p.J, space, 0, 1);
}

// N L[L] + N L[L^+] - M L'[L] - M* L'[L^+] for L = sqrt(kappa) o. Zero terms omitted.
inline std::vector<Dissipator> squeezed_bath(const FockOperator& o, double kappa, double n, cplx m) {
  std::vector<Dissipator> out;
  const FockOperator l = std::sqrt(kappa) * o;
  if (n != 0.0) {
    out.emplace_back(l, DissipatorKind::standard, n);
    out.emplace_back(l, DissipatorKind::conjugate_standard, n);
  }
  if (m != 0.0) {
    out.emplace_back(l, DissipatorKind::anomalous, -m);
    out.emplace_back(l, DissipatorKind::anomalous_conjugate, -std::conj(m));
  }
  return out;
}

// Squeezing-induced thermalization noise on b_s (mode 1 of `space`).
inline std::vector<Dissipator> noise_dissipators(const DeviceParams& p, const SqueezeFrame& f,
                                                 const FockSpace& space, int mode_bs = 1) {
  if (f.r_p == 0.0) return {};
  return squeezed_bath(destroy(space, mode_bs), p.kappa_b, f.N_p, f.M_p);
}

struct BathMoments {
  double N = 0.0;
  cplx M = 0.0;
};

// Effective bath moments of the squeezed mode when R_B is also driven by a
// broadband squeezed vacuum (r_e, theta_e).
inline BathMoments squeezed_vacuum_residual(double r_p, double theta_p, double r_e, double theta_e) {
  if (r_p < 0.0 || r_e < 0.0) throw InvalidArgument("squeezed_vacuum_residual: squeezing parameters must be >= 0");
  const double chp = std::cosh(r_p), shp = std::sinh(r_p);
  const double che = std::cosh(r_e), she = std::sinh(r_e);
  const double phi = theta_p + theta_e;
  BathMoments out;
  out.N = chp * chp * she * she + shp * shp * che * che + 0.5 * std::sinh(2 * r_p) * std::sinh(2 * r_e) * std::cos(phi);
  const cplx first = shp * che + std::polar(1.0, -phi) * chp * she;
  const cplx second = chp * che + std::polar(1.0, phi) * shp * she;
  out.M = std::polar(1.0, theta_p) * first * second;
  return out;
}

// Which reservoir the squeezed mode sees in the forward direction.
enum class Bath {
  vacuum_lab,         // ordinary vacuum in the lab frame: squeezing noise present
  squeezed_vacuum,    // matched squeezed vacuum (r_e = r_p, theta_e = pi - theta_p): noise cancelled
};

// Dissipators of the device for a direction. Space modes are (a, b) or (a, b_s).
inline std::vector<Dissipator> device_dissipators(const DeviceParams& p, const SqueezeFrame& f, Direction dir,
                                                  Bath bath, const FockSpace& space, int mode_a = 0,
                                                  int mode_b = 1) {
  std::vector<Dissipator> out;
  const auto a = destroy(space, mode_a);
  const auto b = destroy(space, mode_b);
  out.emplace_back(std::sqrt(p.kappa_a) * a);
  out.emplace_back(std::sqrt(p.kappa_b) * b);
  if (dir == Direction::forward && f.r_p > 0.0) {
    BathMoments m{f.N_p, f.M_p};
    if (bath == Bath::squeezed_vacuum)
      m = squeezed_vacuum_residual(f.r_p, p.theta_p, f.r_p, std::numbers::pi - p.theta_p);
    // Residual moments of a matched squeezed vacuum vanish up to rounding.
    if (std::abs(m.N) < 1e-12) m.N = 0.0;
    if (std::abs(m.M) < 1e-12) m.M = 0.0;
    auto extra = squeezed_bath(b, p.kappa_b, m.N, m.M);
    out.insert(out.end(), extra.begin(), extra.end());
  }
  return out;
}

inline FockSpace device_space(int dim_a, int dim_b, Direction dir) {
  return FockSpace({dim_a, dim_b}, {"a", dir == Direction::forward ? "b_s" : "b"});
}

inline Liouvillian device_liouvillian(const DeviceParams& p, Direction dir, Bath bath, const FockSpace& space) {
  const SqueezeFrame f = squeeze_frame(p);
  const FockOperator h =
      dir == Direction::forward ? hamiltonian_forward_squeezed(p, f, space) : hamiltonian_backward(p, space);
  return build_liouvillian(h, device_dissipators(p, f, dir, bath, space));
}

// ---------------------------------------------------------------------------
// Pump mean-field mapping (SI units).

inline constexpr double kHbar = 1.054571817e-34;  // J s

struct PumpSpec {
  double g = 0.0;            // rad/s
  double kappa_p = 0.0;      // rad/s
  double kappa_ex2_p = 0.0;  // rad/s
  double Delta_p_c = 0.0;    // rad/s
  double omega_p = 0.0;      // rad/s
  double P_p = 0.0;          // W
  double kappa_a = 1.0;      // rad/s, unit of the dimensionless device parameters

  void validate() const {
    const double v[] = {g, kappa_p, kappa_ex2_p, omega_p, P_p, kappa_a};
    for (double x : v)
      if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("PumpSpec: rates and power must be finite and >= 0");
    if (kappa_ex2_p > kappa_p) throw InvalidArgument("PumpSpec: kappa_ex2_p exceeds kappa_p");
    if (!(kappa_a > 0.0)) throw InvalidArgument("PumpSpec: kappa_a must be > 0");
  }
};

struct PumpStrength {
  double Omega_p = 0.0;  // rad/s
  double theta_p = 0.0;
};

inline PumpStrength pump_strength(const PumpSpec& s) {
  s.validate();
  if (!(s.kappa_p > 0.0)) throw InvalidArgument("pump_strength: kappa_p must be > 0");
  if (s.P_p > 0.0 && !(s.omega_p > 0.0)) throw InvalidArgument("pump_strength: omega_p must be > 0");
  if (s.P_p == 0.0) return {};
  const double alpha_p = std::sqrt(2.0 * std::numbers::pi * s.P_p / (kHbar * s.omega_p));
  const cplx c_ss = std::sqrt(2.0 * s.kappa_ex2_p) * alpha_p / cplx(s.kappa_p, s.Delta_p_c);
  const cplx drive = 2.0 * s.g * c_ss;  // Omega_p e^{-i theta_p}
  return {std::abs(drive), -std::arg(drive)};
}

// Pump power for a resonant pump (Delta_p_c = 0) producing Omega_p (rad/s).
inline double pump_power(double Omega_p, const PumpSpec& s) {
  s.validate();
  if (!(s.g > 0.0)) throw InvalidArgument("pump_power: g must be > 0");
  if (!(s.kappa_ex2_p > 0.0)) throw InvalidArgument("pump_power: kappa_ex2_p must be > 0");
  return kHbar * s.omega_p * s.kappa_p * s.kappa_p * Omega_p * Omega_p /
         (16.0 * std::numbers::pi * s.g * s.g * s.kappa_ex2_p);
}

// ---------------------------------------------------------------------------
// Named operating points.

namespace presets {

inline DeviceParams nms() {
  DeviceParams p;
  p.J = 0.99;
  p.Delta_p_b = 10.3;
  p.Omega_p = 10.0;
  p.alpha_in = 0.6;
  return p;
}

inline DeviceParams mrs() {
  DeviceParams p;
  p.J = 2.8;
  p.Delta_p_b = 15.0;
  p.Omega_p = 13.0;
  p.Delta_a = 2.62;
  p.Delta_b = 2.62;
  p.alpha_in = 0.6;
  return p;
}

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Lithium-niobate chip numbers.
inline PumpSpec ln_chip_pump(double P_p = 16.6e-3) {
  PumpSpec s;
  s.kappa_a = kTwoPi * 2.42e9;
  const double kappa_ex2 = kTwoPi * 2.40e9;
  s.g = kTwoPi * 2.35e6;
  s.kappa_p = 2.0 * s.kappa_a;
  s.kappa_ex2_p = 2.0 * kappa_ex2;
  s.omega_p = kTwoPi * 386.8e12;
  s.Delta_p_c = 0.0;
  s.P_p = P_p;
  return s;
}

inline DeviceParams ln_chip() {
  DeviceParams p = nms();
  p.kappa_ex1 = 2.40 / 2.42;
  p.kappa_ex2 = 2.40 / 2.42;
  return p;
}

// Pump used for the transistor maps: chip numbers with g = 1e-3 kappa_a.
inline PumpSpec transistor_pump() {
  PumpSpec s = ln_chip_pump();
  s.g = 1e-3 * s.kappa_a;
  return s;
}

}  // namespace presets

}  // namespace sqnr
