#pragma once

// Steady-state and time-dependent solvers for a Liouvillian.

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sqnr/errors.hpp"
#include "sqnr/fock.hpp"
#include "sqnr/ode.hpp"

namespace sqnr {

struct SteadyStateOptions {
  double residual_tol = 1e-9;   // relative: |L rho|_inf / (|L|_inf |rho|_inf)
  double fallback_t_end = 50.0;  // kappa_a^-1
  double fallback_rate_tol = 1e-9;
  double uniqueness_tol = 1e-6;
  Eigen::Index direct_max_size = 4096;  // larger systems go to ILUT-preconditioned GMRES first
  double iterative_tol = 1e-13;
};

namespace detail {

inline double row_norm_inf(const SparseSuper& m) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SparseSuper::InnerIterator it(m, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

inline double relative_residual(const Liouvillian& l, const CVector& x) {
  const double scale = row_norm_inf(l.generator()) * x.cwiseAbs().maxCoeff();
  const double r = (l.generator() * x).cwiseAbs().maxCoeff();
  return scale > 0.0 ? r / scale : r;
}

inline CMatrix hermitize(const CMatrix& m) {
  CMatrix h = 0.5 * (m + m.adjoint());
  return h / h.trace();
}

inline CVector evolve_to(const Liouvillian& l, CVector y, double t_end, const OdeOptions& opt) {
  const double outs[] = {t_end};
  CVector last = y;
  integrate_dopri5([&](double t, const CVector& v) { return l.apply(t, v); }, 0.0, std::move(y), outs,
                   [&](double, const CVector& v) { last = v; }, opt);
  return last;
}

}  // namespace detail

// Unique steady state. Replaces the rho_00 row of the generator by the trace
// constraint and solves (GMRES for large systems, then sparse LU); if neither
// meets the residual bound, falls back to long-time integration from two
// different initial states.
inline DensityMatrix steady_state(const Liouvillian& l, const SteadyStateOptions& opt = {}) {
  if (l.is_time_dependent()) throw InvalidArgument("steady_state: Liouvillian is time dependent");
  const int d = l.space().total_dim();
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;

  // Row 0 of the bordered system is Tr(rho) = 1.
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(l.generator().nonZeros()) + d);
  for (Eigen::Index k = 0; k < l.generator().outerSize(); ++k)
    for (SparseSuper::InnerIterator it(l.generator(), k); it; ++it)
      if (it.row() != 0) trips.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < d; ++i) trips.emplace_back(0, static_cast<Eigen::Index>(i) * d + i, 1.0);
  SparseSuper bordered(n, n);
  bordered.setFromTriplets(trips.begin(), trips.end());
  bordered.makeCompressed();

  CVector rhs = CVector::Zero(n);
  rhs[0] = 1.0;

  auto accept = [&](const CVector& x) -> std::optional<CMatrix> {
    if (!x.allFinite()) return std::nullopt;
    CMatrix rho = detail::hermitize(super::unvec(x, d));
    if (detail::relative_residual(l, super::vec(rho)) > opt.residual_tol) return std::nullopt;
    return rho;
  };

  if (n > opt.direct_max_size) {
    Eigen::GMRES<SparseSuper, Eigen::IncompleteLUT<cplx>> gmres;
    gmres.preconditioner().setDroptol(1e-2);
    gmres.preconditioner().setFillfactor(2);
    gmres.setTolerance(opt.iterative_tol);
    gmres.setMaxIterations(2000);
    gmres.set_restart(200);
    gmres.compute(bordered);
    if (gmres.info() == Eigen::Success) {
      const CVector x = gmres.solve(rhs);
      if (gmres.info() == Eigen::Success)
        if (auto rho = accept(x)) return {l.space(), std::move(*rho)};
    }
  }

  Eigen::SparseLU<SparseSuper, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(bordered);
  lu.factorize(bordered);
  if (lu.info() == Eigen::Success) {
    const CVector x = lu.solve(rhs);
    if (lu.info() == Eigen::Success)
      if (auto rho = accept(x)) return {l.space(), std::move(*rho)};
  }

  // Fallback: long-time integration.
  OdeOptions ode;
  const CVector mixed = super::vec(DensityMatrix::maximally_mixed(l.space()).matrix());
  CMatrix vac = CMatrix::Zero(d, d);
  vac(0, 0) = 1.0;
  const CVector a = detail::evolve_to(l, mixed, opt.fallback_t_end, ode);
  const CVector b = detail::evolve_to(l, super::vec(vac), opt.fallback_t_end, ode);
  if ((a - b).cwiseAbs().maxCoeff() > opt.uniqueness_tol)
    throw NumericalError("steady_state: null space of the generator is not one-dimensional");
  const double rate = (l.generator() * a).cwiseAbs().maxCoeff();
  if (rate > opt.fallback_rate_tol)
    throw NumericalError("steady_state: long-time integration did not converge (|drho/dt| = " +
                         std::to_string(rate) + ")");
  return {l.space(), detail::hermitize(super::unvec(a, d))};
}

// Evolves rho0 and returns the state at each time in t_grid (strictly increasing,
// first entry is the initial time).
inline std::vector<DensityMatrix> time_evolve(const Liouvillian& l, const DensityMatrix& rho0,
                                              const std::vector<double>& t_grid, const OdeOptions& opt = {}) {
  if (!(rho0.space() == l.space())) throw InvalidArgument("time_evolve: state and generator spaces differ");
  if (t_grid.empty()) throw InvalidArgument("time_evolve: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw InvalidArgument("time_evolve: time grid must be strictly increasing");

  const int d = l.space().total_dim();
  const DensityTolerances tol{1e-7, 1e-7, -1e-7};
  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());
  integrate_dopri5([&](double t, const CVector& v) { return l.apply(t, v); }, t_grid.front(),
                   super::vec(rho0.matrix()), t_grid,
                   [&](double, const CVector& v) { out.emplace_back(l.space(), super::unvec(v, d), tol); }, opt);
  return out;
}

}  // namespace sqnr
