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

// Quantum channels in Kraus and superoperator form.
//
// Superoperators act on column-stacked density matrices:
// vec(A rho B) = (B^T (x) A) vec(rho), so a Kraus operator K contributes
// conj(K) (x) K.

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "qrb/clifford.hpp"
#include "qrb/common.hpp"

namespace qrb {

class KrausChannel {
 public:
  // Throws InvalidArgument unless sum K^dagger K = 1 within `tol`.
  explicit KrausChannel(std::vector<CMatrix> kraus, double tol = 1e-9);

  static KrausChannel identity(std::uint32_t dim);
  static KrausChannel unitary(const CMatrix& u);

  std::uint32_t dim() const { return dim_; }
  const std::vector<CMatrix>& operators() const { return kraus_; }

 private:
  std::uint32_t dim_;
  std::vector<CMatrix> kraus_;
};

class Superoperator {
 public:
  explicit Superoperator(CMatrix matrix);

  std::uint32_t dim() const { return dim_; }
  const CMatrix& matrix() const { return matrix_; }

 private:
  std::uint32_t dim_;
  CMatrix matrix_;
};

Superoperator to_superoperator(const KrausChannel& ch);

// conj(U) (x) U.
Superoperator unitary_superoperator(const CMatrix& u);

// Choi matrix sum_ij |i><j| (x) E(|i><j|).
CMatrix choi_matrix(const KrausChannel& ch);

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho);
DensityMatrix apply_channel(const Superoperator& s, const DensityMatrix& rho);

// Heisenberg picture: sum K^dagger E K, so tr[E ch(rho)] = tr[adjoint(E) rho].
CMatrix apply_adjoint(const KrausChannel& ch, const CMatrix& effect);

// "Apply first, then second". Kraus operators are all pairwise products;
// with `truncate` they are re-derived from the Choi spectrum, dropping
// eigenvalues below 1e-12.
KrausChannel compose_channels(const KrausChannel& first, const KrausChannel& second, bool truncate = false);

// Minimal Kraus form from the Choi eigendecomposition.
KrausChannel minimal_kraus(const KrausChannel& ch, double cutoff = 1e-12);

// Haar-averaged fidelity (D + sum_k |tr K_k|^2) / (D (D + 1)).
double average_fidelity(const KrausChannel& ch);
double average_fidelity(const Superoperator& s);

// rho -> p rho + (1 - p) 1/D for p in [-1/(D^2 - 1), 1].
KrausChannel depolarizing(double p, std::uint32_t dim);
Superoperator depolarizing_superoperator(double p, std::uint32_t dim);

// p = (D F - 1) / (D - 1) and its inverse.
double depolarizing_parameter(double average_fidelity, std::uint32_t dim);
double average_fidelity_from_parameter(double p, std::uint32_t dim);

// (1/K) sum_k U_k^dagger E(U_k rho U_k^dagger) U_k as a superoperator.
// Summation is a fixed pairwise tree, so the result does not depend on the
// thread count.
Superoperator twirl(const Superoperator& s, const std::vector<CMatrix>& unitaries);
Superoperator twirl(const KrausChannel& ch, const CliffordGroupTable& group);
Superoperator twirl(const Superoperator& s, const CliffordGroupTable& group);

// If s is within Frobenius distance `tol` of a depolarizing channel, its
// parameter. p is read off the traceless sector, (tr S - 1)/(D^2 - 1).
std::optional<double> is_depolarizing(const Superoperator& s, double tol);

// (1/K^2) sum_ij |tr(U_i^dagger U_j)|^4; 2 exactly for a unitary 2-design.
double frame_potential(const std::vector<CMatrix>& unitaries);
double frame_potential(const CliffordGroupTable& group);

// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
// R's diagonal moved into Q.
CMatrix haar_unitary(std::uint32_t dim, Rng& rng);

// Haar-random pure state.
StateVector haar_state(std::uint32_t dim, Rng& rng);

// Channel from a Haar-random Stinespring isometry with environment
// dimension env_dim: K_e = (<e| (x) 1) V.
KrausChannel random_channel(std::uint32_t dim, std::uint32_t env_dim, Rng& rng);

// exp(-i angle G) with G = sum over sites of (X + X^dagger)/2.
KrausChannel over_rotation(double angle, std::uint32_t d, std::uint32_t n);

// Row-major [[ [re, im], ... ], ...].
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

// {"dim": D, "kraus": [matrix, ...]}
nlohmann::json channel_to_json(const KrausChannel& ch);
KrausChannel channel_from_json(const nlohmann::json& j);

}  // namespace qrb
