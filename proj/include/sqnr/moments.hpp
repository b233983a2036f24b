#pragma once

// Exact steady-state moments of the quadratic two-mode model.
//
// The closed hierarchy {<a>, <b>, <a^+ b>, <b^+ b>, <a^+ a>} (and conjugates) is
// linear; its steady state is solved as an 8x8 complex system in which a variable
// and its conjugate are independent unknowns. Second moments are carried as
// fluctuations (<a^+ a> - |<a>|^2 etc.) so that near-critical transmissions do not
// lose digits to cancellation.

#include <Eigen/Dense>

#include <cmath>

#include "sqnr/device.hpp"
#include "sqnr/errors.hpp"

namespace sqnr {

struct MomentSet {
  cplx a = 0.0;       // <a>
  cplx b = 0.0;       // <b> (or <b_s>)
  cplx adag_b = 0.0;  // <a^+ b>
  double n_a = 0.0;   // <a^+ a>
  double n_b = 0.0;   // <b^+ b>
  double dn_a = 0.0;  // <a^+ a> - |<a>|^2
  double dn_b = 0.0;
};

struct MomentProblem {
  double Delta_a = 0.0;
  double Delta_b = 0.0;
  double J = 0.0;
  double kappa_a = 1.0;
  double kappa_b = 1.0;
  double kappa_ex1 = 0.0;
  cplx alpha_in = 0.0;
  double psi_noise = 0.0;  // thermal pumping of <b^+ b>
};

inline MomentSet solve_moments(const MomentProblem& m) {
  enum { A, Ac, B, Bc, X, Xc, Na, Nb };
  const cplx i(0.0, 1.0);
  const double s = std::sqrt(2.0 * m.kappa_ex1);
  const double dab = m.Delta_a - m.Delta_b;
  const double kab = m.kappa_a + m.kappa_b;
  const cplx al = m.alpha_in, alc = std::conj(m.alpha_in);

  Eigen::Matrix<cplx, 8, 8> k = Eigen::Matrix<cplx, 8, 8>::Zero();
  Eigen::Matrix<cplx, 8, 1> r = Eigen::Matrix<cplx, 8, 1>::Zero();

  // d<a>/dt = -(i Da + ka) <a> - i J <b> + s alpha
  k(A, A) = -(i * m.Delta_a + m.kappa_a);
  k(A, B) = -i * m.J;
  r(A) = -s * al;
  k(Ac, Ac) = -(-i * m.Delta_a + m.kappa_a);
  k(Ac, Bc) = i * m.J;
  r(Ac) = -s * alc;
  // d<b>/dt = -(i Db + kb) <b> - i J <a>
  k(B, B) = -(i * m.Delta_b + m.kappa_b);
  k(B, A) = -i * m.J;
  k(Bc, Bc) = -(-i * m.Delta_b + m.kappa_b);
  k(Bc, Ac) = i * m.J;
  // Fluctuations; the coherent drive cancels out of these.
  // d<da^+ db>/dt = (i Dab - kab) <da^+ db> - i J (<da^+ da> - <db^+ db>)
  k(X, X) = i * dab - kab;
  k(X, Na) = -i * m.J;
  k(X, Nb) = i * m.J;
  k(Xc, Xc) = -i * dab - kab;
  k(Xc, Na) = i * m.J;
  k(Xc, Nb) = -i * m.J;
  // d<db^+ db>/dt = i J (<da^+ db> - <db^+ da>) - 2 kb <db^+ db> + psi
  k(Nb, X) = i * m.J;
  k(Nb, Xc) = -i * m.J;
  k(Nb, Nb) = -2.0 * m.kappa_b;
  r(Nb) = -m.psi_noise;
  // d<da^+ da>/dt = -i J (<da^+ db> - <db^+ da>) - 2 ka <da^+ da>
  k(Na, X) = -i * m.J;
  k(Na, Xc) = i * m.J;
  k(Na, Na) = -2.0 * m.kappa_a;

  Eigen::FullPivLU<Eigen::Matrix<cplx, 8, 8>> lu(k);
  if (!lu.isInvertible()) throw NumericalError("solve_moments: singular moment system");
  const Eigen::Matrix<cplx, 8, 1> x = lu.solve(r);
  if (!x.allFinite()) throw NumericalError("solve_moments: non-finite solution");
  MomentSet out;
  out.a = x(A);
  out.b = x(B);
  out.adag_b = x(X) + std::conj(out.a) * out.b;
  out.dn_a = x(Na).real();
  out.dn_b = x(Nb).real();
  out.n_a = out.dn_a + std::norm(out.a);
  out.n_b = out.dn_b + std::norm(out.b);
  return out;
}

inline MomentSet moments_steady(const DeviceParams& p, Direction dir, bool noise_on) {
  const SqueezeFrame f = squeeze_frame(p);
  const ModeCoupling c = coupling_for(p, f, dir);
  MomentProblem m;
  m.Delta_a = p.Delta_a;
  m.Delta_b = c.Delta_b;
  m.J = c.J;
  m.kappa_a = p.kappa_a;
  m.kappa_b = p.kappa_b;
  m.kappa_ex1 = p.kappa_ex1;
  m.alpha_in = p.alpha_in;
  m.psi_noise = (dir == Direction::forward && noise_on) ? 2.0 * f.N_p * p.kappa_b : 0.0;
  return solve_moments(m);
}

// Port transmissions from intracavity moments via the input-output relations.
struct PortTransmissions {
  double through = 0.0;  // T12 (forward) or T21 (backward)
  double drop = 0.0;     // T23 (backward); squeezed-frame diagnostic forward
};

// Output flux |alpha - s <a>|^2 + 2 kappa_ex1 dn_a, with dn_a the fluctuation part
// of <a^+ a>.
inline PortTransmissions transmissions_from_moments(const DeviceParams& p, cplx mean_a, double dn_a, double n_b) {
  const double flux_in = std::norm(p.alpha_in);
  if (!(flux_in > 0.0)) throw InvalidArgument("transmissions_from_moments: alpha_in must be non-zero");
  const double s = std::sqrt(2.0 * p.kappa_ex1);
  const double out = std::norm(p.alpha_in - s * mean_a) + 2.0 * p.kappa_ex1 * dn_a;
  return {out / flux_in, 2.0 * p.kappa_ex2 * n_b / flux_in};
}

inline PortTransmissions moment_transmissions(const DeviceParams& p, Direction dir, bool noise_on) {
  const MomentSet m = moments_steady(p, dir, noise_on);
  return transmissions_from_moments(p, m.a, m.dn_a, m.n_b);
}

}  // namespace sqnr
