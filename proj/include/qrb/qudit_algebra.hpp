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

#pragma once

// Generalized Pauli operators, the Clifford generator gates and a handful of
// dense-matrix utilities shared by the rest of the library.
//
// Tensor ordering: qudit 0 is the most significant digit of a basis index,
// i.e. |s_0 s_1 ... s_{n-1}> has index s_0 d^{n-1} + ... + s_{n-1}.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrb/common.hpp"

namespace qrb {

// exp(2 pi i / d).
Complex root_of_unity(std::uint32_t d);

// exp(pi i / d), the square root of root_of_unity(d) used for even d.
Complex half_root_of_unity(std::uint32_t d);

// Modulus of the Pauli phase exponent: d for odd d, 2d for even d.
std::uint32_t phase_modulus(std::uint32_t d);

// The phase unit w~: root_of_unity(d) for odd d, half_root_of_unity(d) for
// even d. A phase exponent k stands for phase_unit(d)^k.
Complex phase_unit(std::uint32_t d);

// w = phase_unit^(omega_exponent_scale(d)).
std::uint32_t omega_exponent_scale(std::uint32_t d);

// w~^phi * (x) X^{a_i} Z^{b_i} on n qudits, X factor left of Z on every site.
class PauliOperator {
 public:
  // The identity on n qudits of dimension d.
  PauliOperator(std::uint32_t d, std::uint32_t n);
  // Exponents are reduced mod d and the phase mod phase_modulus(d).
  PauliOperator(std::uint32_t d, std::vector<std::uint32_t> x_exponents,
                std::vector<std::uint32_t> z_exponents, std::uint32_t phase = 0);

  // X or Z on a single site.
  static PauliOperator x_on(std::uint32_t d, std::uint32_t n, std::uint32_t site);
  static PauliOperator z_on(std::uint32_t d, std::uint32_t n, std::uint32_t site);

  std::uint32_t d() const { return d_; }
  std::uint32_t n() const { return static_cast<std::uint32_t>(x_.size()); }
  const std::vector<std::uint32_t>& x() const { return x_; }
  const std::vector<std::uint32_t>& z() const { return z_; }
  std::uint32_t phase() const { return phase_; }

  // True when all exponents vanish (any phase).
  bool is_identity_up_to_phase() const;

  PauliOperator with_phase(std::uint32_t phase) const;

  bool operator==(const PauliOperator&) const = default;

  std::string to_string() const;

 private:
  std::uint32_t d_;
  std::vector<std::uint32_t> x_;
  std::vector<std::uint32_t> z_;
  std::uint32_t phase_;
};

// Exact product P*Q with the reordering phase from Z X = w X Z.
PauliOperator pauli_product(const PauliOperator& p, const PauliOperator& q);

// P^k for k >= 0.
PauliOperator pauli_power(const PauliOperator& p, std::uint32_t k);

// Symplectic form a.b' - b.a' mod d; P Q = w^{-<P,Q>} Q P.
std::uint32_t symplectic_form(const PauliOperator& p, const PauliOperator& q);

DenseUnitary pauli_to_dense(const PauliOperator& p);

enum class GateKind { X, Z, F, P, CZ, T };

GateKind parse_gate_kind(std::string_view name);
std::string_view gate_name(GateKind kind);

// Dense matrix of a generator gate; CZ is d^2 x d^2, the rest d x d.
// Defined for any d >= 2; only prime d is used for Clifford tableaux.
DenseUnitary gate(GateKind kind, std::uint32_t d);

// Embeds a single-qudit operator on `site` of an n-qudit register.
CMatrix embed_single(const CMatrix& op, std::uint32_t d, std::uint32_t n, std::uint32_t site);

// CZ between sites i < j of an n-qudit register.
CMatrix embed_cz(std::uint32_t d, std::uint32_t n, std::uint32_t i, std::uint32_t j);

struct PauliMatch {
  std::vector<std::uint32_t> x;
  std::vector<std::uint32_t> z;
  double theta = 0.0;  // U = e^{i theta} (x) X^x Z^z, theta in (-pi, pi]
};

// Recognizes U as a Pauli operator with an arbitrary global phase, entrywise
// within `tol`. Empty if U is not of that form.
std::optional<PauliMatch> pauli_membership(const CMatrix& u, std::uint32_t d, std::uint32_t n,
                                           double tol = 1e-9);

struct SymmetricBlock {
  CMatrix sym;            // 3x3 block on the permutation-symmetric sector
  Complex antisym;        // action on the singlet
  double offdiag_norm;    // Frobenius norm of the blocks coupling the sectors
};

// Two-qubit U in the basis {|00>, (|01>+|10>)/sqrt2, |11>, (|01>-|10>)/sqrt2}.
SymmetricBlock symmetric_block(const CMatrix& u);

// Change of basis used by symmetric_block; columns are the basis vectors.
CMatrix symmetric_basis_two_qubits();

bool is_unitary(const CMatrix& u, double tol = 1e-10);

// Throws InvalidArgument unless rho is a density matrix within tolerance.
void check_density_matrix(const CMatrix& rho, double tol = 1e-10);

// |s> for a basis index s in dimension dim.
StateVector basis_state(std::uint32_t dim, std::uint32_t index);

DensityMatrix pure_density(const StateVector& psi);

}  // namespace qrb
