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

// Clifford gates on n prime-dimensional qudits as symplectic tableaux.
//
// Column c of the tableau is the image of the c-th Pauli generator under
// conjugation U P U^dagger, with generators ordered X_0..X_{n-1},
// Z_0..Z_{n-1}. Rows 0..n-1 hold X exponents, rows n..2n-1 Z exponents, and
// the phase vector holds the w~ exponent of each image. The global phase of
// U is not represented.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "qrb/common.hpp"
#include "qrb/qudit_algebra.hpp"

namespace qrb {

using Rng = std::mt19937_64;

class CliffordTableau {
 public:
  static CliffordTableau identity(std::uint32_t d, std::uint32_t n);

  // `matrix` is 2n x 2n in row-major order. Throws InvalidArgument unless the
  // matrix is symplectic and every generator image has order d.
  CliffordTableau(std::uint32_t d, std::uint32_t n, std::vector<std::uint32_t> matrix,
                  std::vector<std::uint32_t> phases);

  // Tableau whose columns are the given generator images.
  static CliffordTableau from_images(const std::vector<PauliOperator>& images);

  std::uint32_t d() const { return d_; }
  std::uint32_t n() const { return n_; }
  std::uint32_t entry(std::uint32_t row, std::uint32_t col) const { return m_[row * 2 * n_ + col]; }
  std::uint32_t phase(std::uint32_t col) const { return r_[col]; }
  const std::vector<std::uint32_t>& matrix() const { return m_; }
  const std::vector<std::uint32_t>& phases() const { return r_; }

  // Image of generator `col` (X_col for col < n, Z_{col-n} otherwise).
  PauliOperator image(std::uint32_t col) const;

  bool is_identity() const;

  // Exact byte key, usable for hashing.
  std::string key() const;

  std::string dump() const;

  bool operator==(const CliffordTableau&) const = default;

 private:
  CliffordTableau(std::uint32_t d, std::uint32_t n) : d_(d), n_(n) {}
  void validate() const;

  std::uint32_t d_ = 0;
  std::uint32_t n_ = 0;
  std::vector<std::uint32_t> m_;
  std::vector<std::uint32_t> r_;
};

// The n-qudit generator Pauli with index col (see CliffordTableau).
PauliOperator generator_pauli(std::uint32_t d, std::uint32_t n, std::uint32_t col);

// U P U^dagger for the U represented by t.
PauliOperator conjugate_pauli(const CliffordTableau& t, const PauliOperator& p);

// "Apply a, then b": the tableau of U_b U_a.
CliffordTableau compose(const CliffordTableau& a, const CliffordTableau& b);

CliffordTableau invert(const CliffordTableau& t);

// A unitary realizing t, unique up to global phase. The phase is fixed by
// making the first nonzero entry (column-major scan) real and positive.
DenseUnitary tableau_to_dense(const CliffordTableau& t);

// Reads the tableau off a dense Clifford unitary; InvalidArgument if U does
// not normalize the Pauli group.
CliffordTableau tableau_from_dense(const CMatrix& u, std::uint32_t d, std::uint32_t n);

// Tableau of a generator gate. `site2` is only used by CZ.
CliffordTableau gate_tableau(GateKind kind, std::uint32_t d, std::uint32_t n, std::uint32_t site,
                             std::uint32_t site2 = 1);

// {F, P, Z} on every site and CZ on every pair, in that order.
std::vector<CliffordTableau> standard_generators(std::uint32_t d, std::uint32_t n);

// |Sp(2n, Z_d)| = d^{n^2} prod_{i=1..n} (d^{2i} - 1).
std::uint64_t symplectic_group_order(std::uint32_t d, std::uint32_t n);

// |C_d^n| modulo phases: d^{2n} |Sp(2n, Z_d)|.
std::uint64_t clifford_group_order(std::uint32_t d, std::uint32_t n);

// Whether the row-major 2n x 2n matrix satisfies M^T J M = J mod d.
bool is_symplectic(const std::vector<std::uint32_t>& matrix, std::uint32_t d, std::uint32_t n);

// Uniform draw from Sp(2n, Z_d), row-major.
std::vector<std::uint32_t> random_symplectic(std::uint32_t d, std::uint32_t n, Rng& rng);

// Uniform draw from the Clifford group modulo global phase.
CliffordTableau random_clifford(std::uint32_t d, std::uint32_t n, Rng& rng);

// A finite Clifford group with Cayley tables. Index 0 is the identity.
// prod(i, j) is the index of compose(element(i), element(j)), i.e. "apply i,
// then j".
class CliffordGroupTable {
 public:
  // Groups up to this size keep a full product table; larger ones compute
  // products on demand.
  static constexpr std::size_t kFullTableLimit = 4096;

  // Builds the index and Cayley tables. `elements` must be closed under
  // composition, duplicate-free and start with the identity.
  explicit CliffordGroupTable(std::vector<CliffordTableau> elements);

  std::uint32_t d() const { return d_; }
  std::uint32_t n() const { return n_; }
  std::size_t size() const { return elements_.size(); }
  const CliffordTableau& element(std::size_t i) const { return elements_.at(i); }
  const std::vector<CliffordTableau>& elements() const { return elements_; }

  std::optional<std::uint32_t> index_of(const CliffordTableau& t) const;

  std::uint32_t prod(std::uint32_t i, std::uint32_t j) const;
  std::uint32_t inv(std::uint32_t i) const { return inv_.at(i); }
  bool has_full_product_table() const { return !prod_.empty(); }

  // Row i of the Cayley table, computed on demand when it is not stored.
  std::vector<std::uint32_t> prod_row(std::uint32_t i) const;

  // tableau_to_dense for every element, in index order.
  std::vector<DenseUnitary> dense_elements() const;

 private:
  std::uint32_t lookup(const CliffordTableau& t) const;

  std::uint32_t d_;
  std::uint32_t n_;
  std::vector<CliffordTableau> elements_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::uint32_t> prod_;
  std::vector<std::uint32_t> inv_;
};

// Closure of the generators {CZ, F, P, Z}. Throws SizeError when the group
// exceeds `cap` and Unsupported for composite d.
CliffordGroupTable enumerate_group(std::uint32_t d, std::uint32_t n, std::size_t cap = 1'000'000);

// The single-qutrit group as circuits "apply l, then m, then n" with
// l in <P, X>, m in {1, F^2}, n in {1, F, P F, P^2 F} (P F: F first).
// Duplicates are dropped; the caller can compare the size with the closure.
CliffordGroupTable enumerate_qutrit_lmn();

// Binary cache: "QRBG", u32 version, u32 d, u32 n, u64 cardinality, then per
// element (2n)^2 matrix entries followed by 2n phases, each u16. All
// integers little-endian.
inline constexpr std::uint32_t kGroupCacheVersion = 1;
std::vector<std::uint8_t> serialize_group(const CliffordGroupTable& table);
CliffordGroupTable deserialize_group(const std::vector<std::uint8_t>& bytes);
void save_group_cache(const CliffordGroupTable& table, const std::filesystem::path& path);
CliffordGroupTable load_group_cache(const std::filesystem::path& path);

}  // namespace qrb
