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

#include "qrb/clifford.hpp"

#include <cmath>
#include <algorithm>
#include <fstream>
#include <numbers>
#include <sstream>

namespace qrb {

namespace {

void require_prime(std::uint32_t d) {
  if (!is_prime(d)) {
    throw Unsupported("qudit dimension " + std::to_string(d) +
                      " is not prime; Clifford tableaux require prime d");
  }
}

std::uint32_t mod_inverse(std::uint32_t a, std::uint32_t d) {
  // Fermat; d is prime.
  std::uint64_t result = 1, base = a % d;
  for (std::uint32_t e = d - 2; e > 0; e >>= 1) {
    if (e & 1) result = result * base % d;
    base = base * base % d;
  }
  return static_cast<std::uint32_t>(result);
}

using Vec = std::vector<std::uint32_t>;

// <x, y> = x_a . y_b - x_b . y_a mod d for vectors laid out (a | b).
std::uint32_t form(const Vec& x, const Vec& y, std::uint32_t d, std::uint32_t n) {
  std::uint64_t acc = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    acc += static_cast<std::uint64_t>(x[i]) * y[n + i];
    acc += static_cast<std::uint64_t>(d - x[n + i]) * y[i];
  }
  return static_cast<std::uint32_t>(acc % d);
}

// Nonzero rows of the row echelon form of `rows` over Z_d.
std::vector<Vec> independent_rows(std::vector<Vec> rows, std::uint32_t d) {
  if (rows.empty()) return rows;
  const std::size_t width = rows.front().size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < width && rank < rows.size(); ++col) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    const std::uint32_t scale = mod_inverse(rows[rank][col], d);
    for (auto& e : rows[rank]) e = static_cast<std::uint32_t>(static_cast<std::uint64_t>(e) * scale % d);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][col] == 0) continue;
      const std::uint64_t f = rows[r][col];
      for (std::size_t k = 0; k < width; ++k) {
        rows[r][k] = static_cast<std::uint32_t>((rows[r][k] + (d - f) * rows[rank][k]) % d);
      }
    }
    ++rank;
  }
  rows.resize(rank);
  return rows;
}

Vec combine(const std::vector<Vec>& basis, const Vec& coeffs, std::uint32_t d) {
  Vec out(basis.front().size(), 0);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (coeffs[j] == 0) continue;
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = static_cast<std::uint32_t>((out[k] + static_cast<std::uint64_t>(coeffs[j]) * basis[j][k]) % d);
    }
  }
  return out;
}

std::uint32_t parity_of_image(const Vec& col, std::uint32_t n) {
  std::uint32_t acc = 0;
  for (std::uint32_t i = 0; i < n; ++i) acc += col[i] * col[n + i];
  return acc % 2;
}

}  // namespace

PauliOperator generator_pauli(std::uint32_t d, std::uint32_t n, std::uint32_t col) {
  if (col >= 2 * n) throw InvalidArgument("generator index out of range");
  return col < n ? PauliOperator::x_on(d, n, col) : PauliOperator::z_on(d, n, col - n);
}

CliffordTableau CliffordTableau::identity(std::uint32_t d, std::uint32_t n) {
  require_prime(d);
  CliffordTableau t(d, n);
  t.m_.assign(4 * n * n, 0);
  for (std::uint32_t i = 0; i < 2 * n; ++i) t.m_[i * 2 * n + i] = 1;
  t.r_.assign(2 * n, 0);
  return t;
}

CliffordTableau::CliffordTableau(std::uint32_t d, std::uint32_t n, std::vector<std::uint32_t> matrix,
                                 std::vector<std::uint32_t> phases)
    : d_(d), n_(n), m_(std::move(matrix)), r_(std::move(phases)) {
  require_prime(d);
  if (n == 0) throw InvalidArgument("CliffordTableau: need at least one qudit");
  if (m_.size() != 4 * static_cast<std::size_t>(n) * n || r_.size() != 2 * static_cast<std::size_t>(n)) {
    throw DimensionMismatch("CliffordTableau: matrix or phase vector has the wrong size");
  }
  for (auto& e : m_) e %= d;
  for (auto& e : r_) e %= phase_modulus(d);
  validate();
}

CliffordTableau CliffordTableau::from_images(const std::vector<PauliOperator>& images) {
  if (images.empty() || images.size() % 2 != 0) throw InvalidArgument("from_images: need 2n images");
  const std::uint32_t d = images.front().d();
  const std::uint32_t n = static_cast<std::uint32_t>(images.size() / 2);
  std::vector<std::uint32_t> m(4 * n * n), r(2 * n);
  for (std::uint32_t c = 0; c < 2 * n; ++c) {
    const auto& p = images[c];
    if (p.d() != d || p.n() != n) throw DimensionMismatch("from_images: inconsistent registers");
    for (std::uint32_t i = 0; i < n; ++i) {
      m[i * 2 * n + c] = p.x()[i];
      m[(n + i) * 2 * n + c] = p.z()[i];
    }
    r[c] = p.phase();
  }
  return CliffordTableau(d, n, std::move(m), std::move(r));
}

void CliffordTableau::validate() const {
  if (!is_symplectic(m_, d_, n_)) throw InvalidArgument("CliffordTableau: matrix is not symplectic\n" + dump());
  if (d_ == 2) {
    // Images must square to +1: the i-exponent parity equals sum a_i b_i.
    for (std::uint32_t c = 0; c < 2 * n_; ++c) {
      Vec col(2 * n_);
      for (std::uint32_t row = 0; row < 2 * n_; ++row) col[row] = entry(row, c);
      if (r_[c] % 2 != parity_of_image(col, n_)) {
        throw InvalidArgument("CliffordTableau: phase of generator image " + std::to_string(c) +
                              " is inconsistent with its order\n" + dump());
      }
    }
  }
}

PauliOperator CliffordTableau::image(std::uint32_t col) const {
  std::vector<std::uint32_t> x(n_), z(n_);
  for (std::uint32_t i = 0; i < n_; ++i) {
    x[i] = entry(i, col);
    z[i] = entry(n_ + i, col);
  }
  return PauliOperator(d_, std::move(x), std::move(z), r_[col]);
}

bool CliffordTableau::is_identity() const { return *this == identity(d_, n_); }

std::string CliffordTableau::key() const {
  std::string k;
  k.reserve(m_.size() + r_.size());
  for (auto e : m_) k.push_back(static_cast<char>(e));
  for (auto e : r_) k.push_back(static_cast<char>(e));
  return k;
}

std::string CliffordTableau::dump() const {
  std::ostringstream os;
  os << "tableau d=" << d_ << " n=" << n_ << "\n";
  for (std::uint32_t row = 0; row < 2 * n_; ++row) {
    for (std::uint32_t col = 0; col < 2 * n_; ++col) os << entry(row, col) << ' ';
    os << "\n";
  }
  os << "phases:";
  for (auto e : r_) os << ' ' << e;
  return os.str();
}

PauliOperator conjugate_pauli(const CliffordTableau& t, const PauliOperator& p) {
  if (t.d() != p.d() || t.n() != p.n()) throw DimensionMismatch("conjugate_pauli: register mismatch");
  const std::uint32_t n = t.n();
  PauliOperator out = PauliOperator(t.d(), n).with_phase(p.phase());
  for (std::uint32_t i = 0; i < n; ++i) {
    if (p.x()[i] != 0) out = pauli_product(out, pauli_power(t.image(i), p.x()[i]));
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    if (p.z()[i] != 0) out = pauli_product(out, pauli_power(t.image(n + i), p.z()[i]));
  }
  return out;
}

CliffordTableau compose(const CliffordTableau& a, const CliffordTableau& b) {
  if (a.d() != b.d() || a.n() != b.n()) throw DimensionMismatch("compose: register mismatch");
  std::vector<PauliOperator> images;
  images.reserve(2 * a.n());
  for (std::uint32_t c = 0; c < 2 * a.n(); ++c) images.push_back(conjugate_pauli(b, a.image(c)));
  return CliffordTableau::from_images(images);
}

CliffordTableau invert(const CliffordTableau& t) {
  const std::uint32_t d = t.d(), n = t.n();
  const std::uint32_t mod = phase_modulus(d);
  std::vector<Vec> cols(2 * n, Vec(2 * n));
  for (std::uint32_t c = 0; c < 2 * n; ++c) {
    for (std::uint32_t row = 0; row < 2 * n; ++row) cols[c][row] = t.entry(row, c);
  }
  std::vector<PauliOperator> images;
  images.reserve(2 * n);
  for (std::uint32_t g = 0; g < 2 * n; ++g) {
    // v = M^{-1} e_g from <e_k, v> = <M e_k, e_g>.
    Vec e(2 * n, 0);
    e[g] = 1;
    std::vector<std::uint32_t> x(n), z(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      z[i] = form(cols[i], e, d, n);
      x[i] = (d - form(cols[n + i], e, d, n)) % d;
    }
    PauliOperator pre(d, std::move(x), std::move(z));
    const PauliOperator mapped = conjugate_pauli(t, pre);
    if (!(mapped.with_phase(0) == generator_pauli(d, n, g))) {
      throw InternalError("invert: symplectic inverse failed\n" + t.dump());
    }
    images.push_back(pre.with_phase(mod - mapped.phase()));
  }
  return CliffordTableau::from_images(images);
}

DenseUnitary tableau_to_dense(const CliffordTableau& t) {
  const std::uint32_t d = t.d(), n = t.n();
  const std::uint32_t dim = ipow(d, n);
  std::vector<CMatrix> xs, zs;
  for (std::uint32_t i = 0; i < n; ++i) {
    xs.push_back(pauli_to_dense(t.image(i)));
    zs.push_back(pauli_to_dense(t.image(n + i)));
  }
  // U|0...0> spans the joint +1 eigenspace of the Z images.
  CMatrix proj = CMatrix::Identity(dim, dim);
  for (std::uint32_t i = 0; i < n; ++i) {
    CMatrix avg = CMatrix::Zero(dim, dim);
    CMatrix power = CMatrix::Identity(dim, dim);
    for (std::uint32_t k = 0; k < d; ++k) {
      avg += power;
      power = power * zs[i];
    }
    proj = proj * (avg / static_cast<double>(d));
  }
  Eigen::Index best = 0;
  proj.colwise().norm().maxCoeff(&best);
  CVector vacuum = proj.col(best);
  const double norm = vacuum.norm();
  if (norm < 1e-6) throw InternalError("tableau_to_dense: empty stabilizer space\n" + t.dump());
  vacuum /= norm;

  // U|s> = prod_i X_i'^{s_i} U|0>.
  CMatrix u(dim, dim);
  for (std::uint32_t s = 0; s < dim; ++s) {
    CVector v = vacuum;
    std::uint32_t rest = s;
    for (std::uint32_t i = n; i-- > 0;) {
      const std::uint32_t digit = rest % d;
      rest /= d;
      for (std::uint32_t k = 0; k < digit; ++k) v = xs[i] * v;
    }
    u.col(s) = v;
  }

  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index r = 0;
    bool found = false;
    for (; r < u.rows(); ++r) {
      if (std::abs(u(r, c)) > 1e-9) {
        found = true;
        break;
      }
    }
    if (found) {
      u *= std::conj(u(r, c)) / std::abs(u(r, c));
      break;
    }
  }

  for (std::uint32_t g = 0; g < 2 * n; ++g) {
    const CMatrix lhs = u * pauli_to_dense(generator_pauli(d, n, g)) * u.adjoint();
    if (max_abs_diff(lhs, pauli_to_dense(t.image(g))) > 1e-9) {
      throw InternalError("tableau_to_dense: synthesis failed\n" + t.dump());
    }
  }
  return u;
}

CliffordTableau tableau_from_dense(const CMatrix& u, std::uint32_t d, std::uint32_t n) {
  require_prime(d);
  const std::uint32_t dim = ipow(d, n);
  if (u.rows() != dim || u.cols() != dim) throw DimensionMismatch("tableau_from_dense: matrix size mismatch");
  if (!is_unitary(u, 1e-9)) throw InvalidArgument("tableau_from_dense: matrix is not unitary");
  const std::uint32_t mod = phase_modulus(d);
  std::vector<PauliOperator> images;
  for (std::uint32_t g = 0; g < 2 * n; ++g) {
    const CMatrix v = u * pauli_to_dense(generator_pauli(d, n, g)) * u.adjoint();
    auto match = pauli_membership(v, d, n);
    if (!match) throw InvalidArgument("tableau_from_dense: matrix does not normalize the Pauli group");
    const double turns = match->theta * mod / (2.0 * std::numbers::pi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 1e-6) {
      throw InvalidArgument("tableau_from_dense: image phase is not a power of the phase unit");
    }
    const auto phase = static_cast<std::uint32_t>(((static_cast<long long>(rounded) % mod) + mod) % mod);
    images.emplace_back(d, match->x, match->z, phase);
  }
  return CliffordTableau::from_images(images);
}

std::vector<CliffordTableau> standard_generators(std::uint32_t d, std::uint32_t n) {
  std::vector<CliffordTableau> gens;
  for (std::uint32_t s = 0; s < n; ++s) {
    for (GateKind k : {GateKind::F, GateKind::P, GateKind::Z}) gens.push_back(gate_tableau(k, d, n, s));
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) gens.push_back(gate_tableau(GateKind::CZ, d, n, i, j));
  }
  return gens;
}

CliffordTableau gate_tableau(GateKind kind, std::uint32_t d, std::uint32_t n, std::uint32_t site,
                             std::uint32_t site2) {
  const CMatrix u = kind == GateKind::CZ ? embed_cz(d, n, site, site2) : embed_single(gate(kind, d), d, n, site);
  return tableau_from_dense(u, d, n);
}

std::uint64_t symplectic_group_order(std::uint32_t d, std::uint32_t n) {
  require_prime(d);
  long double order = 1;
  std::uint64_t exact = 1;
  for (std::uint32_t i = 0; i < n * n; ++i) exact *= d, order *= d;
  std::uint64_t d2i = 1;
  for (std::uint32_t i = 1; i <= n; ++i) {
    d2i *= static_cast<std::uint64_t>(d) * d;
    exact *= d2i - 1;
    order *= static_cast<long double>(d2i - 1);
  }
  if (order > 1.8e19L) throw SizeError("symplectic group order overflows 64 bits");
  return exact;
}

std::uint64_t clifford_group_order(std::uint32_t d, std::uint32_t n) {
  const std::uint64_t sp = symplectic_group_order(d, n);
  long double order = sp;
  std::uint64_t exact = sp;
  for (std::uint32_t i = 0; i < 2 * n; ++i) exact *= d, order *= d;
  if (order > 1.8e19L) throw SizeError("Clifford group order overflows 64 bits");
  return exact;
}

bool is_symplectic(const std::vector<std::uint32_t>& matrix, std::uint32_t d, std::uint32_t n) {
  if (matrix.size() != 4 * static_cast<std::size_t>(n) * n) return false;
  std::vector<Vec> cols(2 * n, Vec(2 * n));
  for (std::uint32_t c = 0; c < 2 * n; ++c) {
    for (std::uint32_t row = 0; row < 2 * n; ++row) cols[c][row] = matrix[row * 2 * n + c] % d;
  }
  for (std::uint32_t i = 0; i < 2 * n; ++i) {
    for (std::uint32_t j = 0; j < 2 * n; ++j) {
      std::uint32_t expected = 0;
      if (i < n && j == i + n) expected = 1;
      if (i >= n && j + n == i) expected = d - 1;
      if (form(cols[i], cols[j], d, n) != expected) return false;
    }
  }
  return true;
}

std::vector<std::uint32_t> random_symplectic(std::uint32_t d, std::uint32_t n, Rng& rng) {
  require_prime(d);
  if (n == 0) throw InvalidArgument("random_symplectic: need n >= 1");
  std::uniform_int_distribution<std::uint32_t> digit(0, d - 1);
  auto draw = [&](std::size_t len) {
    Vec c(len);
    for (auto& e : c) e = digit(rng);
    return c;
  };

  // Basis of the symplectic complement of the pairs chosen so far.
  std::vector<Vec> basis(2 * n, Vec(2 * n, 0));
  for (std::uint32_t i = 0; i < 2 * n; ++i) basis[i][i] = 1;

  std::vector<Vec> cols(2 * n);
  for (std::uint32_t i = 0; i < n; ++i) {
    // v: uniform over the d^{2k} - 1 nonzero vectors of the complement.
    Vec v;
    for (;;) {
      Vec c = draw(basis.size());
      if (std::any_of(c.begin(), c.end(), [](std::uint32_t e) { return e != 0; })) {
        v = combine(basis, c, d);
        break;
      }
    }
    // w: uniform over the d^{2k-1} vectors with <v, w> = 1. Each accepted u
    // rescales onto one such w, and every w has exactly d-1 preimages.
    Vec w;
    for (;;) {
      Vec u = combine(basis, draw(basis.size()), d);
      const std::uint32_t lam = form(v, u, d, n);
      if (lam == 0) continue;
      const std::uint64_t s = mod_inverse(lam, d);
      for (auto& e : u) e = static_cast<std::uint32_t>(e * s % d);
      w = std::move(u);
      break;
    }
    cols[i] = v;
    cols[n + i] = w;

    std::vector<Vec> projected;
    projected.reserve(basis.size());
    for (const auto& b : basis) {
      const std::uint64_t wb = form(w, b, d, n);
      const std::uint64_t vb = form(v, b, d, n);
      Vec p(2 * n);
      for (std::uint32_t k = 0; k < 2 * n; ++k) p[k] = static_cast<std::uint32_t>((b[k] + wb * v[k] + (d - vb) * w[k]) % d);
      projected.push_back(std::move(p));
    }
    const std::size_t expected = basis.size() - 2;
    basis = independent_rows(std::move(projected), d);
    if (basis.size() != expected) throw InternalError("random_symplectic: complement has the wrong dimension");
  }

  std::vector<std::uint32_t> m(4 * n * n);
  for (std::uint32_t c = 0; c < 2 * n; ++c) {
    for (std::uint32_t row = 0; row < 2 * n; ++row) m[row * 2 * n + c] = cols[c][row];
  }
  return m;
}

CliffordTableau random_clifford(std::uint32_t d, std::uint32_t n, Rng& rng) {
  auto m = random_symplectic(d, n, rng);
  std::vector<std::uint32_t> r(2 * n);
  std::uniform_int_distribution<std::uint32_t> digit(0, d - 1);
  for (std::uint32_t c = 0; c < 2 * n; ++c) {
    if (d == 2) {
      Vec col(2 * n);
      for (std::uint32_t row = 0; row < 2 * n; ++row) col[row] = m[row * 2 * n + c];
      r[c] = parity_of_image(col, n) + 2 * digit(rng);
    } else {
      r[c] = digit(rng);
    }
  }
  return CliffordTableau(d, n, std::move(m), std::move(r));
}

CliffordGroupTable::CliffordGroupTable(std::vector<CliffordTableau> elements)
    : elements_(std::move(elements)) {
  if (elements_.empty()) throw InvalidArgument("CliffordGroupTable: no elements");
  d_ = elements_.front().d();
  n_ = elements_.front().n();
  if (!elements_.front().is_identity()) throw InvalidArgument("CliffordGroupTable: element 0 must be the identity");
  if (elements_.size() > 0xffffffffULL) throw SizeError("CliffordGroupTable: too many elements");
  index_.reserve(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].d() != d_ || elements_[i].n() != n_) throw DimensionMismatch("CliffordGroupTable: mixed registers");
    if (!index_.emplace(elements_[i].key(), static_cast<std::uint32_t>(i)).second) {
      throw InvalidArgument("CliffordGroupTable: duplicate element " + std::to_string(i));
    }
  }
  const std::size_t size = elements_.size();
  inv_.resize(size);
  parallel_for(size, [&](std::size_t i) { inv_[i] = lookup(invert(elements_[i])); });
  if (size > kFullTableLimit) return;

  prod_.resize(size * size);
  // Write every element j > 0 as compose(parent_j, g_j) with parent_j < j.
  // Then prod(i, j) = prod(prod(i, parent_j), g_j) is a table lookup.
  std::vector<CliffordTableau> gens;
  std::vector<std::uint32_t> gen_index;
  for (const auto& g : standard_generators(d_, n_)) {
    if (auto k = index_of(g)) {
      gens.push_back(g);
      gen_index.push_back(*k);
    }
  }
  std::vector<std::uint32_t> order{0}, parent(size, 0), via(size, 0);
  std::vector<bool> reached(size, false);
  reached[0] = true;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (std::uint32_t g = 0; g < gens.size(); ++g) {
      const std::uint32_t k = lookup(compose(elements_[order[head]], gens[g]));
      if (!reached[k]) {
        reached[k] = true;
        parent[k] = order[head];
        via[k] = g;
        order.push_back(k);
      }
    }
  }
  if (order.size() != size) {
    parallel_for(size, [&](std::size_t i) {
      for (std::size_t j = 0; j < size; ++j) prod_[i * size + j] = lookup(compose(elements_[i], elements_[j]));
    });
    return;
  }
  std::vector<std::uint32_t> right(size * gens.size());
  parallel_for(size, [&](std::size_t i) {
    for (std::size_t g = 0; g < gens.size(); ++g) right[i * gens.size() + g] = lookup(compose(elements_[i], gens[g]));
  });
  parallel_for(size, [&](std::size_t i) {
    std::uint32_t* row = &prod_[i * size];
    row[0] = static_cast<std::uint32_t>(i);
    for (std::size_t pos = 1; pos < size; ++pos) {
      const std::uint32_t j = order[pos];
      row[j] = right[static_cast<std::size_t>(row[parent[j]]) * gens.size() + via[j]];
    }
  });
}

std::uint32_t CliffordGroupTable::lookup(const CliffordTableau& t) const {
  auto it = index_.find(t.key());
  if (it == index_.end()) throw InvalidArgument("CliffordGroupTable: element set is not closed\n" + t.dump());
  return it->second;
}

std::optional<std::uint32_t> CliffordGroupTable::index_of(const CliffordTableau& t) const {
  if (t.d() != d_ || t.n() != n_) return std::nullopt;
  auto it = index_.find(t.key());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t CliffordGroupTable::prod(std::uint32_t i, std::uint32_t j) const {
  if (!prod_.empty()) return prod_.at(static_cast<std::size_t>(i) * size() + j);
  return lookup(compose(elements_.at(i), elements_.at(j)));
}

std::vector<std::uint32_t> CliffordGroupTable::prod_row(std::uint32_t i) const {
  std::vector<std::uint32_t> row(size());
  for (std::uint32_t j = 0; j < size(); ++j) row[j] = prod(i, j);
  return row;
}

std::vector<DenseUnitary> CliffordGroupTable::dense_elements() const {
  std::vector<DenseUnitary> out(size());
  parallel_for(size(), [&](std::size_t i) { out[i] = tableau_to_dense(elements_[i]); });
  return out;
}

CliffordGroupTable enumerate_group(std::uint32_t d, std::uint32_t n, std::size_t cap) {
  require_prime(d);
  if (n == 0) throw InvalidArgument("enumerate_group: need n >= 1");
  std::uint64_t order = 0;
  try {
    order = clifford_group_order(d, n);
  } catch (const SizeError&) {
    throw SizeError("enumerate_group: |C| = d^{2n} |Sp(2n, Z_d)| overflows 64 bits for d=" +
                    std::to_string(d) + " n=" + std::to_string(n));
  }
  if (order > cap) {
    throw SizeError("enumerate_group: |C| = d^{2n} |Sp(2n, Z_d)| = " + std::to_string(order) +
                    " exceeds the cap of " + std::to_string(cap));
  }
  const auto gens = standard_generators(d, n);
  std::vector<CliffordTableau> elements{CliffordTableau::identity(d, n)};
  std::unordered_map<std::string, std::uint32_t> seen{{elements.front().key(), 0}};
  for (std::size_t head = 0; head < elements.size(); ++head) {
    for (const auto& g : gens) {
      CliffordTableau next = compose(elements[head], g);
      if (seen.emplace(next.key(), static_cast<std::uint32_t>(elements.size())).second) {
        elements.push_back(std::move(next));
      }
    }
  }
  if (elements.size() != order) {
    throw InternalError("enumerate_group: closure has " + std::to_string(elements.size()) +
                        " elements, expected " + std::to_string(order));
  }
  return CliffordGroupTable(std::move(elements));
}

CliffordGroupTable enumerate_qutrit_lmn() {
  constexpr std::uint32_t d = 3, n = 1;
  const auto p = gate_tableau(GateKind::P, d, n, 0);
  const auto x = gate_tableau(GateKind::X, d, n, 0);
  const auto f = gate_tableau(GateKind::F, d, n, 0);
  const auto id = CliffordTableau::identity(d, n);

  std::vector<CliffordTableau> l{id};
  std::unordered_map<std::string, std::uint32_t> seen{{id.key(), 0}};
  for (std::size_t head = 0; head < l.size(); ++head) {
    for (const auto* g : {&p, &x}) {
      auto next = compose(l[head], *g);
      if (seen.emplace(next.key(), static_cast<std::uint32_t>(l.size())).second) l.push_back(std::move(next));
    }
  }
  const std::vector<CliffordTableau> m{id, compose(f, f)};
  // P F means "apply F, then P".
  const std::vector<CliffordTableau> nn{id, f, compose(f, p), compose(f, compose(p, p))};

  std::vector<CliffordTableau> elements;
  seen.clear();
  for (const auto& a : l) {
    for (const auto& b : m) {
      for (const auto& c : nn) {
        // Circuit order: a, then b, then c. The reverse matrix order a*b*c
        // only reaches 108 distinct gates.
        auto t = compose(compose(a, b), c);
        if (seen.emplace(t.key(), static_cast<std::uint32_t>(elements.size())).second) elements.push_back(std::move(t));
      }
    }
  }
  return CliffordGroupTable(std::move(elements));
}

namespace {

constexpr char kMagic[4] = {'Q', 'R', 'B', 'G'};

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(const std::vector<std::uint8_t>& in, std::size_t& pos, int bytes) {
  if (pos + bytes > in.size()) throw InvalidArgument("group cache: truncated data");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
  pos += bytes;
  return v;
}

}  // namespace

std::vector<std::uint8_t> serialize_group(const CliffordGroupTable& table) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_le(out, kGroupCacheVersion, 4);
  put_le(out, table.d(), 4);
  put_le(out, table.n(), 4);
  put_le(out, table.size(), 8);
  for (const auto& t : table.elements()) {
    for (auto e : t.matrix()) put_le(out, e, 2);
    for (auto e : t.phases()) put_le(out, e, 2);
  }
  return out;
}

CliffordGroupTable deserialize_group(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw InvalidArgument("group cache: bad magic");
  }
  std::size_t pos = 4;
  const auto version = get_le(bytes, pos, 4);
  if (version != kGroupCacheVersion) throw InvalidArgument("group cache: unsupported version " + std::to_string(version));
  const auto d = static_cast<std::uint32_t>(get_le(bytes, pos, 4));
  const auto n = static_cast<std::uint32_t>(get_le(bytes, pos, 4));
  const auto count = get_le(bytes, pos, 8);
  if (n == 0 || n > 16) throw InvalidArgument("group cache: implausible qudit count");
  const std::size_t record = (4 * static_cast<std::size_t>(n) * n + 2 * n) * 2;
  if (count == 0 || (bytes.size() - pos) != count * record) throw InvalidArgument("group cache: size does not match header");
  std::vector<CliffordTableau> elements;
  elements.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    std::vector<std::uint32_t> m(4 * n * n), r(2 * n);
    for (auto& e : m) e = static_cast<std::uint32_t>(get_le(bytes, pos, 2));
    for (auto& e : r) e = static_cast<std::uint32_t>(get_le(bytes, pos, 2));
    for (auto e : m) if (e >= d) throw InvalidArgument("group cache: matrix entry out of range");
    for (auto e : r) if (e >= phase_modulus(d)) throw InvalidArgument("group cache: phase out of range");
    elements.emplace_back(d, n, std::move(m), std::move(r));
  }
  return CliffordGroupTable(std::move(elements));
}

void save_group_cache(const CliffordGroupTable& table, const std::filesystem::path& path) {
  const auto bytes = serialize_group(table);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error("failed writing " + path.string());
}

CliffordGroupTable load_group_cache(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open group cache " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return deserialize_group(bytes);
}

}  // namespace qrb
