#pragma once

// Independent reference implementations used by the tests. Written from the
// model equations directly (complex amplitudes, Lyapunov equations, brute-force
// matrices), not from the library's closed forms.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>

namespace oracle {

using ld = long double;
using lc = std::complex<long double>;

struct Device {
  ld ka = 1, kb = 1, k1 = 0.99, k2 = 0.99, J = 0.99, Omega = 0, theta = 0, Dpb = 10.3, Da = 0, Db = 0;
};

inline ld r_from(ld beta) { return 0.25L * std::log((1 + beta) / (1 - beta)); }

struct Frame {
  ld r = 0, Js = 0, Dbs = 0;
};

// Bogoliubov frame from its defining relations: tanh(2r) = beta, the squeezed
// mode rotates at Delta_p_b sqrt(1-beta^2) relative to the half pump frequency.
inline Frame frame(const Device& d) {
  Frame f;
  const ld beta = d.Omega > 0 ? d.Omega / d.Dpb : 0;
  f.r = std::atanh(beta) / 2;
  f.Js = std::cosh(f.r) * d.J;
  const ld d_in = d.Dpb - d.Db;  // probe detuning from half pump
  f.Dbs = d.Dpb * std::sqrt(1 - beta * beta) - d_in;
  return f;
}

// Linear response of the coupled pair: a_ss from the 2x2 mean-field equations,
// through amplitude 1 - sqrt(2 k1) a / alpha, drop amplitude sqrt(2 k2) b / alpha.
struct Amplitudes {
  lc through, drop;
};

inline Amplitudes amplitudes(const Device& d, ld delta_b, ld j) {
  const lc i(0, 1);
  const lc m11 = i * d.Da + d.ka, m22 = i * delta_b + d.kb, m12 = i * j;
  const lc det = m11 * m22 - m12 * m12;
  const lc a = std::sqrt(2 * d.k1) * m22 / det;  // per unit alpha
  const lc b = -m12 * a / m22;
  return {1.0L - std::sqrt(2 * d.k1) * a, std::sqrt(2 * d.k2) * b};
}

inline ld T12_sv(const Device& d) {
  const Frame f = frame(d);
  return std::norm(amplitudes(d, f.Dbs, f.Js).through);
}
inline ld T21(const Device& d) { return std::norm(amplitudes(d, d.Db, d.J).through); }
inline ld T23(const Device& d) { return std::norm(amplitudes(d, d.Db, d.J).drop); }

// Stationary fluctuation photons in a from a thermal-like occupation N on the
// squeezed mode: solve conj(M) C + C M^T + D = 0 for C_ij = <dc_i^+ dc_j>.
inline double noise_photons(const Device& d) {
  const Frame f = frame(d);
  const double n = std::pow(std::sinh(static_cast<double>(f.r)), 2);
  using C2 = Eigen::Matrix2cd;
  const std::complex<double> i(0, 1);
  C2 m;
  m << -(i * double(d.Da) + double(d.ka)), -i * double(f.Js), -i * double(f.Js), -(i * double(f.Dbs) + double(d.kb));
  const C2 id = C2::Identity();
  Eigen::Matrix4cd sys = Eigen::kroneckerProduct(id, m.conjugate()) + Eigen::kroneckerProduct(m, id);
  Eigen::Vector4cd rhs = Eigen::Vector4cd::Zero();
  rhs(3) = -2.0 * double(d.kb) * n;  // vec(D), column-major, D = diag(0, 2 kb N)
  const Eigen::Vector4cd c = sys.fullPivLu().solve(rhs);
  return c(0).real();
}

}  // namespace oracle
