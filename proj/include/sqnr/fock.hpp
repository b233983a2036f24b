#pragma once

// Truncated Fock-space operator algebra and Liouvillian assembly.
//
// Density matrices are vectorized column-major: rho(i, j) sits at i + j * D.
// With that convention vec(A X B) = (B^T kron A) vec(X).

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sqnr/errors.hpp"

namespace sqnr {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseSuper = Eigen::SparseMatrix<cplx>;

class FockSpace {
 public:
  FockSpace(std::vector<int> dims, std::vector<std::string> labels)
      : dims_(std::move(dims)), labels_(std::move(labels)) {
    if (dims_.empty()) throw InvalidArgument("FockSpace: no modes");
    if (labels_.size() != dims_.size())
      throw InvalidArgument("FockSpace: label count does not match mode count");
    for (int d : dims_)
      if (d < 2) throw InvalidArgument("FockSpace: every mode needs dimension >= 2");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw InvalidArgument("FockSpace: duplicate mode label");
    total_ = std::accumulate(dims_.begin(), dims_.end(), 1, std::multiplies<>());
  }

  int total_dim() const { return total_; }
  int num_modes() const { return static_cast<int>(dims_.size()); }
  int dim(int mode) const { return dims_.at(check_mode(mode)); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }

  int index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw InvalidArgument("FockSpace: unknown mode '" + label + "'");
    return static_cast<int>(it - labels_.begin());
  }

  // Flat basis index; mode 0 is the most significant tensor factor.
  int basis_index(const std::vector<int>& occupations) const {
    if (occupations.size() != dims_.size()) throw InvalidArgument("FockSpace: occupation rank");
    int idx = 0;
    for (std::size_t m = 0; m < dims_.size(); ++m) {
      if (occupations[m] < 0 || occupations[m] >= dims_[m])
        throw InvalidArgument("FockSpace: occupation out of range");
      idx = idx * dims_[m] + occupations[m];
    }
    return idx;
  }

  friend bool operator==(const FockSpace& a, const FockSpace& b) {
    return a.dims_ == b.dims_ && a.labels_ == b.labels_;
  }

 private:
  std::size_t check_mode(int mode) const {
    if (mode < 0 || mode >= num_modes()) throw InvalidArgument("FockSpace: mode index out of range");
    return static_cast<std::size_t>(mode);
  }

  std::vector<int> dims_;
  std::vector<std::string> labels_;
  int total_ = 1;
};

class FockOperator {
 public:
  FockOperator(FockSpace space, CMatrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
    const int d = space_.total_dim();
    if (matrix_.rows() != d || matrix_.cols() != d)
      throw InvalidArgument("FockOperator: matrix shape does not match space dimension");
  }

  static FockOperator identity(const FockSpace& space) {
    return {space, CMatrix::Identity(space.total_dim(), space.total_dim())};
  }
  static FockOperator zero(const FockSpace& space) {
    return {space, CMatrix::Zero(space.total_dim(), space.total_dim())};
  }

  const FockSpace& space() const { return space_; }
  const CMatrix& matrix() const { return matrix_; }

  FockOperator dag() const { return {space_, matrix_.adjoint()}; }

  bool is_hermitian(double tol = 1e-10) const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }

  FockOperator& operator+=(const FockOperator& o) {
    require_same(o);
    matrix_ += o.matrix_;
    return *this;
  }
  FockOperator& operator-=(const FockOperator& o) {
    require_same(o);
    matrix_ -= o.matrix_;
    return *this;
  }
  FockOperator& operator*=(cplx s) {
    matrix_ *= s;
    return *this;
  }

  friend FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
  friend FockOperator operator-(FockOperator a, const FockOperator& b) { return a -= b; }
  friend FockOperator operator*(cplx s, FockOperator a) { return a *= s; }
  friend FockOperator operator*(FockOperator a, cplx s) { return a *= s; }
  friend FockOperator operator*(const FockOperator& a, const FockOperator& b) {
    a.require_same(b);
    return {a.space_, a.matrix_ * b.matrix_};
  }

  void require_same(const FockOperator& o) const {
    if (!(space_ == o.space_)) throw InvalidArgument("FockOperator: operators live on different spaces");
  }

 private:
  FockSpace space_;
  CMatrix matrix_;
};

// Bosonic lowering operator of one mode, identity on the others.
inline FockOperator destroy(const FockSpace& space, int mode_index) {
  if (mode_index < 0 || mode_index >= space.num_modes())
    throw InvalidArgument("destroy: mode index out of range");
  const auto& dims = space.dims();
  int left = 1, right = 1;
  for (int m = 0; m < mode_index; ++m) left *= dims[m];
  for (int m = mode_index + 1; m < space.num_modes(); ++m) right *= dims[m];
  const int n = dims[mode_index];

  CMatrix out = CMatrix::Zero(space.total_dim(), space.total_dim());
  for (int l = 0; l < left; ++l)
    for (int k = 1; k < n; ++k)
      for (int r = 0; r < right; ++r) {
        const int row = (l * n + (k - 1)) * right + r;
        const int col = (l * n + k) * right + r;
        out(row, col) = std::sqrt(static_cast<double>(k));
      }
  return {space, std::move(out)};
}

inline FockOperator destroy(const FockSpace& space, const std::string& label) {
  return destroy(space, space.index_of(label));
}

inline FockOperator number(const FockSpace& space, int mode_index) {
  auto a = destroy(space, mode_index);
  return a.dag() * a;
}

struct DensityTolerances {
  double trace = 1e-10;
  double hermitian = 1e-10;
  double min_eigenvalue = -1e-8;
};

class DensityMatrix {
 public:
  DensityMatrix(FockSpace space, CMatrix matrix, DensityTolerances tol = {})
      : space_(std::move(space)), matrix_(std::move(matrix)) {
    const int d = space_.total_dim();
    if (matrix_.rows() != d || matrix_.cols() != d)
      throw InvalidArgument("DensityMatrix: matrix shape does not match space dimension");
    const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol.hermitian)
      throw NumericalError("DensityMatrix: not Hermitian (deviation " + std::to_string(herm) + ")");
    const cplx tr = matrix_.trace();
    if (std::abs(tr - 1.0) > tol.trace)
      throw NumericalError("DensityMatrix: trace " + std::to_string(tr.real()) + " is not 1");
    const double lmin = min_eigenvalue();
    if (lmin < tol.min_eigenvalue)
      throw NumericalError("DensityMatrix: negative eigenvalue " + std::to_string(lmin));
  }

  static DensityMatrix fock_state(const FockSpace& space, const std::vector<int>& occupations) {
    CMatrix m = CMatrix::Zero(space.total_dim(), space.total_dim());
    const int i = space.basis_index(occupations);
    m(i, i) = 1.0;
    return {space, std::move(m)};
  }

  static DensityMatrix maximally_mixed(const FockSpace& space) {
    const int d = space.total_dim();
    return {space, CMatrix::Identity(d, d) / static_cast<double>(d)};
  }

  const FockSpace& space() const { return space_; }
  const CMatrix& matrix() const { return matrix_; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (matrix_ + matrix_.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  cplx expect(const FockOperator& op) const {
    if (!(op.space() == space_)) throw InvalidArgument("expect: operator on a different space");
    return (op.matrix() * matrix_).trace();
  }

 private:
  FockSpace space_;
  CMatrix matrix_;
};

enum class DissipatorKind {
  standard,             // L[o]   rho = 2 o rho o^+ - o^+ o rho - rho o^+ o
  conjugate_standard,   // L[o^+]
  anomalous,            // L'[o]  rho = 2 o rho o - o o rho - rho o o
  anomalous_conjugate,  // L'[o^+]
};

struct Dissipator {
  FockOperator collapse;  // carries sqrt(rate)
  DissipatorKind kind = DissipatorKind::standard;
  cplx weight = 1.0;

  Dissipator(FockOperator op, DissipatorKind k = DissipatorKind::standard, cplx w = 1.0)
      : collapse(std::move(op)), kind(k), weight(w) {
    const bool standard = kind == DissipatorKind::standard || kind == DissipatorKind::conjugate_standard;
    if (standard && (weight.imag() != 0.0 || weight.real() < 0.0))
      throw InvalidArgument("Dissipator: standard kinds need a real non-negative weight");
  }
};

namespace super {

inline SparseSuper kron(const CMatrix& left, const CMatrix& right) {
  const Eigen::Index rl = left.rows(), rr = right.rows();
  std::vector<Eigen::Triplet<cplx>> trips;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> nz_left, nz_right;
  for (Eigen::Index j = 0; j < left.cols(); ++j)
    for (Eigen::Index i = 0; i < rl; ++i)
      if (left(i, j) != 0.0) nz_left.emplace_back(i, j);
  for (Eigen::Index j = 0; j < right.cols(); ++j)
    for (Eigen::Index i = 0; i < rr; ++i)
      if (right(i, j) != 0.0) nz_right.emplace_back(i, j);
  trips.reserve(nz_left.size() * nz_right.size());
  for (auto [i, j] : nz_left)
    for (auto [k, l] : nz_right)
      trips.emplace_back(i * rr + k, j * right.cols() + l, left(i, j) * right(k, l));
  SparseSuper out(rl * rr, left.cols() * right.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

// rho -> A rho
inline SparseSuper pre(const CMatrix& a) {
  return kron(CMatrix::Identity(a.rows(), a.cols()), a);
}
// rho -> rho B
inline SparseSuper post(const CMatrix& b) {
  return kron(b.transpose(), CMatrix::Identity(b.rows(), b.cols()));
}
// rho -> A rho B
inline SparseSuper prepost(const CMatrix& a, const CMatrix& b) { return kron(b.transpose(), a); }

// rho -> -i [H, rho]
inline SparseSuper commutator(const CMatrix& h) {
  const cplx mi(0.0, -1.0);
  SparseSuper out = pre(h) - post(h);
  return mi * out;
}

// Unit-weight superoperator of one dissipator kind (no factor 1/2).
inline SparseSuper dissipator(const CMatrix& o, DissipatorKind kind) {
  switch (kind) {
    case DissipatorKind::standard:
    case DissipatorKind::conjugate_standard: {
      const CMatrix c = kind == DissipatorKind::standard ? o : CMatrix(o.adjoint());
      const CMatrix cdc = c.adjoint() * c;
      SparseSuper out = 2.0 * prepost(c, c.adjoint()) - pre(cdc) - post(cdc);
      return out;
    }
    case DissipatorKind::anomalous:
    case DissipatorKind::anomalous_conjugate: {
      const CMatrix c = kind == DissipatorKind::anomalous ? o : CMatrix(o.adjoint());
      const CMatrix cc = c * c;
      SparseSuper out = 2.0 * prepost(c, c) - pre(cc) - post(cc);
      return out;
    }
  }
  throw InvalidArgument("dissipator: unknown kind");
}

inline CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

inline CMatrix unvec(const CVector& v, int dim) {
  return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

// Row vector w with w . vec(rho) = Tr(op rho).
inline CVector expectation_row(const CMatrix& op) { return vec(op.transpose()); }

}  // namespace super

struct TimeDependentPart {
  std::function<double(double)> profile;
  SparseSuper generator;
};

class Liouvillian {
 public:
  Liouvillian(FockSpace space, SparseSuper generator, std::vector<TimeDependentPart> parts = {})
      : space_(std::move(space)), generator_(std::move(generator)), parts_(std::move(parts)) {
    const Eigen::Index n = static_cast<Eigen::Index>(space_.total_dim()) * space_.total_dim();
    if (generator_.rows() != n || generator_.cols() != n)
      throw InvalidArgument("Liouvillian: superoperator shape does not match space");
    for (const auto& p : parts_)
      if (p.generator.rows() != n || p.generator.cols() != n || !p.profile)
        throw InvalidArgument("Liouvillian: malformed time-dependent part");
    generator_.makeCompressed();
  }

  const FockSpace& space() const { return space_; }
  const SparseSuper& generator() const { return generator_; }
  const std::vector<TimeDependentPart>& time_dependent_parts() const { return parts_; }
  bool is_time_dependent() const { return !parts_.empty(); }

  CVector apply(double t, const CVector& rho_vec) const {
    CVector out = generator_ * rho_vec;
    for (const auto& p : parts_) {
      const double f = p.profile(t);
      if (f != 0.0) out.noalias() += f * (p.generator * rho_vec);
    }
    return out;
  }

  CMatrix apply(double t, const CMatrix& rho) const {
    return super::unvec(apply(t, super::vec(rho)), space_.total_dim());
  }

  Liouvillian with_part(TimeDependentPart part) const {
    auto parts = parts_;
    parts.push_back(std::move(part));
    return {space_, generator_, std::move(parts)};
  }

 private:
  FockSpace space_;
  SparseSuper generator_;
  std::vector<TimeDependentPart> parts_;
};

inline Liouvillian build_liouvillian(const FockOperator& hamiltonian, const std::vector<Dissipator>& dissipators) {
  if (!hamiltonian.is_hermitian(1e-10)) throw InvalidArgument("build_liouvillian: Hamiltonian is not Hermitian");
  SparseSuper gen = super::commutator(hamiltonian.matrix());
  for (const auto& d : dissipators) {
    hamiltonian.require_same(d.collapse);
    if (d.weight == 0.0) continue;
    SparseSuper term = d.weight * super::dissipator(d.collapse.matrix(), d.kind);
    gen += term;
  }
  gen.prune(cplx(0.0));
  return {hamiltonian.space(), std::move(gen)};
}

}  // namespace sqnr
