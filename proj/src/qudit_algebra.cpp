// Copyright 2026 The qrb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrb/qudit_algebra.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qrb {

namespace {

void require_dimension(std::uint32_t d) {
  if (d < 2) throw InvalidArgument("invalid qudit dimension " + std::to_string(d) + " (need d >= 2)");
}

Complex unit_phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Index -> digits, qudit 0 most significant.
std::vector<std::uint32_t> digits(std::uint32_t index, std::uint32_t d, std::uint32_t n) {
  std::vector<std::uint32_t> out(n);
  for (std::uint32_t k = n; k-- > 0;) {
    out[k] = index % d;
    index /= d;
  }
  return out;
}

}  // namespace

Complex root_of_unity(std::uint32_t d) {
  require_dimension(d);
  return unit_phase(2.0 * std::numbers::pi / d);
}

Complex half_root_of_unity(std::uint32_t d) {
  require_dimension(d);
  return unit_phase(std::numbers::pi / d);
}

std::uint32_t phase_modulus(std::uint32_t d) {
  require_dimension(d);
  return d % 2 == 0 ? 2 * d : d;
}

std::uint32_t omega_exponent_scale(std::uint32_t d) { return phase_modulus(d) / d; }

Complex phase_unit(std::uint32_t d) {
  return d % 2 == 0 ? half_root_of_unity(d) : root_of_unity(d);
}

PauliOperator::PauliOperator(std::uint32_t d, std::uint32_t n)
    : d_(d), x_(n, 0), z_(n, 0), phase_(0) {
  require_dimension(d);
}

PauliOperator::PauliOperator(std::uint32_t d, std::vector<std::uint32_t> x_exponents,
                             std::vector<std::uint32_t> z_exponents, std::uint32_t phase)
    : d_(d), x_(std::move(x_exponents)), z_(std::move(z_exponents)), phase_(0) {
  require_dimension(d);
  if (x_.size() != z_.size()) {
    throw DimensionMismatch("PauliOperator: X and Z exponent vectors differ in length");
  }
  for (auto& e : x_) e %= d_;
  for (auto& e : z_) e %= d_;
  phase_ = phase % phase_modulus(d_);
}

PauliOperator PauliOperator::x_on(std::uint32_t d, std::uint32_t n, std::uint32_t site) {
  PauliOperator p(d, n);
  p.x_.at(site) = 1;
  return p;
}

PauliOperator PauliOperator::z_on(std::uint32_t d, std::uint32_t n, std::uint32_t site) {
  PauliOperator p(d, n);
  p.z_.at(site) = 1;
  return p;
}

bool PauliOperator::is_identity_up_to_phase() const {
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (x_[i] != 0 || z_[i] != 0) return false;
  }
  return true;
}

PauliOperator PauliOperator::with_phase(std::uint32_t phase) const {
  PauliOperator out = *this;
  out.phase_ = phase % phase_modulus(d_);
  return out;
}

std::string PauliOperator::to_string() const {
  std::ostringstream os;
  os << "w~^" << phase_;
  for (std::size_t i = 0; i < x_.size(); ++i) os << " X" << i << "^" << x_[i] << " Z" << i << "^" << z_[i];
  return os.str();
}

PauliOperator pauli_product(const PauliOperator& p, const PauliOperator& q) {
  if (p.d() != q.d() || p.n() != q.n()) {
    throw DimensionMismatch("pauli_product: operands act on different registers");
  }
  const std::uint32_t d = p.d();
  const std::uint32_t mod = phase_modulus(d);
  // (X^a Z^b)(X^a' Z^b') = w^{b a'} X^{a+a'} Z^{b+b'}
  std::uint64_t reorder = 0;
  std::vector<std::uint32_t> x(p.n()), z(p.n());
  for (std::uint32_t i = 0; i < p.n(); ++i) {
    reorder += static_cast<std::uint64_t>(p.z()[i]) * q.x()[i];
    x[i] = p.x()[i] + q.x()[i];
    z[i] = p.z()[i] + q.z()[i];
  }
  const std::uint64_t phase =
      p.phase() + q.phase() + (reorder % d) * omega_exponent_scale(d);
  return PauliOperator(d, std::move(x), std::move(z), static_cast<std::uint32_t>(phase % mod));
}

PauliOperator pauli_power(const PauliOperator& p, std::uint32_t k) {
  PauliOperator out(p.d(), p.n());
  for (std::uint32_t i = 0; i < k; ++i) out = pauli_product(out, p);
  return out;
}

std::uint32_t symplectic_form(const PauliOperator& p, const PauliOperator& q) {
  if (p.d() != q.d() || p.n() != q.n()) throw DimensionMismatch("symplectic_form: register mismatch");
  const std::uint64_t d = p.d();
  std::uint64_t acc = 0;
  for (std::uint32_t i = 0; i < p.n(); ++i) {
    acc += p.x()[i] * static_cast<std::uint64_t>(q.z()[i]);
    acc += (d - p.z()[i]) * static_cast<std::uint64_t>(q.x()[i]);
  }
  return static_cast<std::uint32_t>(acc % d);
}

DenseUnitary pauli_to_dense(const PauliOperator& p) {
  const std::uint32_t d = p.d();
  const DenseUnitary x = gate(GateKind::X, d);
  const DenseUnitary z = gate(GateKind::Z, d);
  CMatrix out = CMatrix::Identity(1, 1);
  for (std::uint32_t i = 0; i < p.n(); ++i) {
    CMatrix site = CMatrix::Identity(d, d);
    for (std::uint32_t k = 0; k < p.x()[i]; ++k) site = site * x;
    for (std::uint32_t k = 0; k < p.z()[i]; ++k) site = site * z;
    out = kron(out, site);
  }
  const double angle = 2.0 * std::numbers::pi * p.phase() / phase_modulus(d);
  return unit_phase(angle) * out;
}

GateKind parse_gate_kind(std::string_view name) {
  if (name == "X") return GateKind::X;
  if (name == "Z") return GateKind::Z;
  if (name == "F") return GateKind::F;
  if (name == "P") return GateKind::P;
  if (name == "CZ") return GateKind::CZ;
  if (name == "T") return GateKind::T;
  throw InvalidArgument("unknown gate kind '" + std::string(name) + "'");
}

std::string_view gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::F: return "F";
    case GateKind::P: return "P";
    case GateKind::CZ: return "CZ";
    case GateKind::T: return "T";
  }
  throw InvalidArgument("unknown gate kind");
}

DenseUnitary gate(GateKind kind, std::uint32_t d) {
  require_dimension(d);
  const double two_pi = 2.0 * std::numbers::pi;
  const double dd = d;
  switch (kind) {
    case GateKind::X: {
      CMatrix m = CMatrix::Zero(d, d);
      for (std::uint32_t s = 0; s < d; ++s) m((s + 1) % d, s) = 1.0;
      return m;
    }
    case GateKind::Z: {
      CMatrix m = CMatrix::Zero(d, d);
      for (std::uint32_t s = 0; s < d; ++s) m(s, s) = unit_phase(two_pi * s / dd);
      return m;
    }
    case GateKind::F: {
      CMatrix m(d, d);
      const double norm = 1.0 / std::sqrt(dd);
      for (std::uint32_t s = 0; s < d; ++s) {
        for (std::uint32_t t = 0; t < d; ++t) m(t, s) = norm * unit_phase(two_pi * ((s * t) % d) / dd);
      }
      return m;
    }
    case GateKind::P: {
      // w^{s(s+rho)/2}; for even d the half-integer exponent means powers of
      // exp(pi i / d).
      const std::uint64_t rho = d % 2 == 1 ? 1 : 0;
      CMatrix m = CMatrix::Zero(d, d);
      for (std::uint64_t s = 0; s < d; ++s) {
        const std::uint64_t twice = (s * (s + rho)) % (2 * static_cast<std::uint64_t>(d));
        m(s, s) = unit_phase(std::numbers::pi * static_cast<double>(twice) / dd);
      }
      return m;
    }
    case GateKind::CZ: {
      CMatrix m = CMatrix::Zero(d * d, d * d);
      for (std::uint32_t s = 0; s < d; ++s) {
        for (std::uint32_t t = 0; t < d; ++t) m(s * d + t, s * d + t) = unit_phase(two_pi * ((s * t) % d) / dd);
      }
      return m;
    }
    case GateKind::T: {
      // w^{s^3/d^2} = exp(2 pi i s^3 / d^3)
      const std::uint64_t d3 = static_cast<std::uint64_t>(d) * d * d;
      CMatrix m = CMatrix::Zero(d, d);
      for (std::uint64_t s = 0; s < d; ++s) {
        m(s, s) = unit_phase(two_pi * static_cast<double>((s * s * s) % d3) / static_cast<double>(d3));
      }
      return m;
    }
  }
  throw InvalidArgument("unknown gate kind");
}

CMatrix embed_single(const CMatrix& op, std::uint32_t d, std::uint32_t n, std::uint32_t site) {
  if (op.rows() != d || op.cols() != d) throw DimensionMismatch("embed_single: operator is not d x d");
  if (site >= n) throw InvalidArgument("embed_single: site out of range");
  CMatrix out = CMatrix::Identity(1, 1);
  for (std::uint32_t i = 0; i < n; ++i) {
    out = kron(out, i == site ? op : CMatrix::Identity(d, d));
  }
  return out;
}

CMatrix embed_cz(std::uint32_t d, std::uint32_t n, std::uint32_t i, std::uint32_t j) {
  if (i >= n || j >= n || i == j) throw InvalidArgument("embed_cz: bad site pair");
  const std::uint32_t dim = ipow(d, n);
  CMatrix out = CMatrix::Zero(dim, dim);
  for (std::uint32_t s = 0; s < dim; ++s) {
    const auto dig = digits(s, d, n);
    out(s, s) = unit_phase(2.0 * std::numbers::pi * ((dig[i] * dig[j]) % d) / d);
  }
  return out;
}

std::optional<PauliMatch> pauli_membership(const CMatrix& u, std::uint32_t d, std::uint32_t n,
                                           double tol) {
  require_dimension(d);
  const std::uint32_t dim = ipow(d, n);
  if (u.rows() != u.cols()) throw DimensionMismatch("pauli_membership: matrix is not square");
  if (u.rows() != dim) {
    throw DimensionMismatch("pauli_membership: expected " + std::to_string(dim) + "x" +
                            std::to_string(dim) + " matrix");
  }
  // X^a Z^b |0> = |a>, so the support of column 0 fixes a.
  Eigen::Index row = 0;
  u.col(0).cwiseAbs().maxCoeff(&row);
  const auto x = digits(static_cast<std::uint32_t>(row), d, n);
  const std::uint32_t zcount = dim;
  for (std::uint32_t zi = 0; zi < zcount; ++zi) {
    PauliOperator candidate(d, x, digits(zi, d, n));
    const CMatrix p = pauli_to_dense(candidate);
    const Complex overlap = (p.adjoint() * u).trace() / static_cast<double>(dim);
    if (std::abs(std::abs(overlap) - 1.0) > 1e-6) continue;
    const double theta = std::arg(overlap);
    if (max_abs_diff(u, unit_phase(theta) * p) <= tol) {
      return PauliMatch{candidate.x(), candidate.z(), theta};
    }
  }
  return std::nullopt;
}

CMatrix symmetric_basis_two_qubits() {
  const double h = 1.0 / std::sqrt(2.0);
  CMatrix b = CMatrix::Zero(4, 4);
  b(0, 0) = 1.0;
  b(1, 1) = h;
  b(2, 1) = h;
  b(3, 2) = 1.0;
  b(1, 3) = h;
  b(2, 3) = -h;
  return b;
}

SymmetricBlock symmetric_block(const CMatrix& u) {
  if (u.rows() != 4 || u.cols() != 4) throw DimensionMismatch("symmetric_block: need a 4x4 matrix");
  if (!is_unitary(u, 1e-10)) throw InvalidArgument("symmetric_block: input is not unitary");
  const CMatrix b = symmetric_basis_two_qubits();
  const CMatrix v = b.adjoint() * u * b;
  SymmetricBlock out;
  out.sym = v.topLeftCorner(3, 3);
  out.antisym = v(3, 3);
  out.offdiag_norm = std::sqrt(v.topRightCorner(3, 1).squaredNorm() + v.bottomLeftCorner(1, 3).squaredNorm());
  return out;
}

bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm() <= tol;
}

void check_density_matrix(const CMatrix& rho, double tol) {
  if (rho.rows() != rho.cols()) throw DimensionMismatch("density matrix is not square");
  if ((rho - rho.adjoint()).norm() > tol) throw InvalidArgument("density matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > tol) throw InvalidArgument("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) throw InvalidArgument("density matrix is not positive semidefinite");
}

StateVector basis_state(std::uint32_t dim, std::uint32_t index) {
  if (index >= dim) throw InvalidArgument("basis_state: index out of range");
  StateVector v = StateVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

DensityMatrix pure_density(const StateVector& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-12) throw InvalidArgument("state vector is not normalized");
  return psi * psi.adjoint();
}

}  // namespace qrb
