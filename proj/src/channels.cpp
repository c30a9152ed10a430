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

#include "qrb/channels.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "qrb/qudit_algebra.hpp"

namespace qrb {

namespace {

constexpr std::size_t kTwirlLeaf = 16;

std::uint32_t checked_dim(Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (rows != cols || rows == 0) throw DimensionMismatch(std::string(what) + ": operator is not square");
  return static_cast<std::uint32_t>(rows);
}

CMatrix pairwise_sum(const std::vector<CMatrix>& items, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return items[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(items, lo, mid) + pairwise_sum(items, mid, hi);
}

// Unitary operator basis {X^a Z^b} of dimension dim.
std::vector<CMatrix> weyl_basis(std::uint32_t dim) {
  const CMatrix x = gate(GateKind::X, dim);
  const CMatrix z = gate(GateKind::Z, dim);
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(dim) * dim);
  CMatrix xa = CMatrix::Identity(dim, dim);
  for (std::uint32_t a = 0; a < dim; ++a) {
    CMatrix w = xa;
    for (std::uint32_t b = 0; b < dim; ++b) {
      out.push_back(w);
      w = w * z;
    }
    xa = xa * x;
  }
  return out;
}

}  // namespace

KrausChannel::KrausChannel(std::vector<CMatrix> kraus, double tol) : dim_(0), kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw InvalidArgument("KrausChannel: no Kraus operators");
  dim_ = checked_dim(kraus_.front().rows(), kraus_.front().cols(), "KrausChannel");
  CMatrix sum = CMatrix::Zero(dim_, dim_);
  for (const auto& k : kraus_) {
    if (k.rows() != dim_ || k.cols() != dim_) throw DimensionMismatch("KrausChannel: Kraus operators differ in size");
    sum += k.adjoint() * k;
  }
  const double err = (sum - CMatrix::Identity(dim_, dim_)).norm();
  if (err > tol) {
    throw InvalidArgument("KrausChannel: not trace preserving (|sum K^dag K - 1| = " + std::to_string(err) + ")");
  }
}

KrausChannel KrausChannel::identity(std::uint32_t dim) { return KrausChannel({CMatrix::Identity(dim, dim)}); }

KrausChannel KrausChannel::unitary(const CMatrix& u) {
  checked_dim(u.rows(), u.cols(), "KrausChannel::unitary");
  if (!is_unitary(u, 1e-9)) throw InvalidArgument("KrausChannel::unitary: matrix is not unitary");
  return KrausChannel({u});
}

Superoperator::Superoperator(CMatrix matrix) : dim_(0), matrix_(std::move(matrix)) {
  const auto n = checked_dim(matrix_.rows(), matrix_.cols(), "Superoperator");
  const auto d = static_cast<std::uint32_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (d * d != n) throw DimensionMismatch("Superoperator: size is not a perfect square");
  dim_ = d;
}

Superoperator to_superoperator(const KrausChannel& ch) {
  const auto n = static_cast<Eigen::Index>(ch.dim()) * ch.dim();
  CMatrix s = CMatrix::Zero(n, n);
  for (const auto& k : ch.operators()) s += kron(k.conjugate(), k);
  return Superoperator(std::move(s));
}

Superoperator unitary_superoperator(const CMatrix& u) {
  checked_dim(u.rows(), u.cols(), "unitary_superoperator");
  return Superoperator(kron(u.conjugate(), u));
}

CMatrix choi_matrix(const KrausChannel& ch) {
  const std::uint32_t d = ch.dim();
  CMatrix c = CMatrix::Zero(d * d, d * d);
  for (const auto& k : ch.operators()) {
    CVector v(d * d);
    for (std::uint32_t i = 0; i < d; ++i) v.segment(i * d, d) = k.col(i);
    c += v * v.adjoint();
  }
  return c;
}

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho) {
  if (rho.rows() != ch.dim() || rho.cols() != ch.dim()) throw DimensionMismatch("apply_channel: dimension mismatch");
  DensityMatrix out = DensityMatrix::Zero(ch.dim(), ch.dim());
  for (const auto& k : ch.operators()) out += k * rho * k.adjoint();
  return out;
}

DensityMatrix apply_channel(const Superoperator& s, const DensityMatrix& rho) {
  const std::uint32_t d = s.dim();
  if (rho.rows() != d || rho.cols() != d) throw DimensionMismatch("apply_channel: dimension mismatch");
  const CVector v = s.matrix() * rho.reshaped();
  return v.reshaped(d, d);
}

CMatrix apply_adjoint(const KrausChannel& ch, const CMatrix& effect) {
  if (effect.rows() != ch.dim() || effect.cols() != ch.dim()) throw DimensionMismatch("apply_adjoint: dimension mismatch");
  CMatrix out = CMatrix::Zero(ch.dim(), ch.dim());
  for (const auto& k : ch.operators()) out += k.adjoint() * effect * k;
  return out;
}

KrausChannel compose_channels(const KrausChannel& first, const KrausChannel& second, bool truncate) {
  if (first.dim() != second.dim()) throw DimensionMismatch("compose_channels: dimension mismatch");
  std::vector<CMatrix> out;
  out.reserve(first.operators().size() * second.operators().size());
  for (const auto& b : second.operators()) {
    for (const auto& a : first.operators()) out.push_back(b * a);
  }
  KrausChannel composed(std::move(out));
  return truncate ? minimal_kraus(composed) : composed;
}

KrausChannel minimal_kraus(const KrausChannel& ch, double cutoff) {
  const std::uint32_t d = ch.dim();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(choi_matrix(ch));
  std::vector<CMatrix> out;
  for (Eigen::Index e = es.eigenvalues().size(); e-- > 0;) {
    const double lambda = es.eigenvalues()(e);
    if (lambda <= cutoff) continue;
    const CVector v = std::sqrt(lambda) * es.eigenvectors().col(e);
    CMatrix k(d, d);
    for (std::uint32_t i = 0; i < d; ++i) k.col(i) = v.segment(i * d, d);
    out.push_back(std::move(k));
  }
  return KrausChannel(std::move(out));
}

double average_fidelity(const KrausChannel& ch) {
  const double d = ch.dim();
  double acc = 0.0;
  for (const auto& k : ch.operators()) acc += std::norm(k.trace());
  return (d + acc) / (d * (d + 1.0));
}

double average_fidelity(const Superoperator& s) {
  // tr(conj(K) (x) K) = |tr K|^2, so tr S = sum_k |tr K_k|^2.
  const double d = s.dim();
  return (d + s.matrix().trace().real()) / (d * (d + 1.0));
}

KrausChannel depolarizing(double p, std::uint32_t dim) {
  if (dim < 2) throw InvalidArgument("depolarizing: need D >= 2");
  const double dd = static_cast<double>(dim) * dim;
  const double lower = -1.0 / (dd - 1.0);
  if (!(p >= lower - 1e-15 && p <= 1.0 + 1e-15)) {
    throw InvalidArgument("depolarizing: p = " + std::to_string(p) + " outside the completely positive range [" +
                          std::to_string(lower) + ", 1]");
  }
  // p rho + (1-p) 1/D = (p + (1-p)/D^2) rho + (1-p)/D^2 sum_{W != 1} W rho W^dag.
  const double w0 = std::max(0.0, p + (1.0 - p) / dd);
  const double wk = std::max(0.0, (1.0 - p) / dd);
  std::vector<CMatrix> kraus;
  const auto basis = weyl_basis(dim);
  kraus.push_back(std::sqrt(w0) * basis.front());
  if (wk > 0.0) {
    for (std::size_t k = 1; k < basis.size(); ++k) kraus.push_back(std::sqrt(wk) * basis[k]);
  }
  return KrausChannel(std::move(kraus));
}

Superoperator depolarizing_superoperator(double p, std::uint32_t dim) {
  const auto n = static_cast<Eigen::Index>(dim) * dim;
  const CVector id = CMatrix::Identity(dim, dim).reshaped();
  CMatrix s = p * CMatrix::Identity(n, n) + ((1.0 - p) / dim) * (id * id.transpose());
  return Superoperator(std::move(s));
}

double depolarizing_parameter(double average_fidelity, std::uint32_t dim) {
  const double d = dim;
  return (d * average_fidelity - 1.0) / (d - 1.0);
}

double average_fidelity_from_parameter(double p, std::uint32_t dim) {
  const double d = dim;
  return p + (1.0 - p) / d;
}

Superoperator twirl(const Superoperator& s, const std::vector<CMatrix>& unitaries) {
  if (unitaries.empty()) throw InvalidArgument("twirl: empty unitary set");
  for (const auto& u : unitaries) {
    if (u.rows() != s.dim() || u.cols() != s.dim()) throw DimensionMismatch("twirl: unitary and channel dimensions differ");
  }
  const std::size_t count = unitaries.size();
  const std::size_t leaves = (count + kTwirlLeaf - 1) / kTwirlLeaf;
  std::vector<CMatrix> partial(leaves);
  parallel_for(leaves, [&](std::size_t leaf) {
    const std::size_t lo = leaf * kTwirlLeaf;
    const std::size_t hi = std::min(count, lo + kTwirlLeaf);
    std::vector<CMatrix> terms;
    terms.reserve(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
      const CMatrix su = kron(unitaries[k].conjugate(), unitaries[k]);
      terms.push_back(su.adjoint() * s.matrix() * su);
    }
    partial[leaf] = pairwise_sum(terms, 0, terms.size());
  });
  return Superoperator(pairwise_sum(partial, 0, partial.size()) / static_cast<double>(count));
}

Superoperator twirl(const KrausChannel& ch, const CliffordGroupTable& group) {
  return twirl(to_superoperator(ch), group);
}

Superoperator twirl(const Superoperator& s, const CliffordGroupTable& group) {
  if (ipow(group.d(), group.n()) != s.dim()) throw DimensionMismatch("twirl: group and channel dimensions differ");
  return twirl(s, group.dense_elements());
}

std::optional<double> is_depolarizing(const Superoperator& s, double tol) {
  const double d = s.dim();
  const Complex tr = s.matrix().trace();
  const double p = (tr.real() - 1.0) / (d * d - 1.0);
  const double residual = (s.matrix() - depolarizing_superoperator(p, s.dim()).matrix()).norm();
  if (residual > tol) return std::nullopt;
  return p;
}

double frame_potential(const std::vector<CMatrix>& unitaries) {
  if (unitaries.empty()) throw InvalidArgument("frame_potential: empty unitary set");
  const std::size_t k = unitaries.size();
  std::vector<double> rows(k);
  parallel_for(k, [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double t = std::norm(unitaries[i].cwiseProduct(unitaries[j].conjugate()).sum());
      acc += t * t;
    }
    rows[i] = acc;
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return total / (static_cast<double>(k) * static_cast<double>(k));
}

double frame_potential(const CliffordGroupTable& group) { return frame_potential(group.dense_elements()); }

CMatrix haar_unitary(std::uint32_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix g(dim, dim);
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = Complex(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const Complex diag = r(i, i);
    q.col(i) *= diag / std::abs(diag);
  }
  return q;
}

StateVector haar_state(std::uint32_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  StateVector v(dim);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(normal(rng), normal(rng));
  return v / v.norm();
}

KrausChannel random_channel(std::uint32_t dim, std::uint32_t env_dim, Rng& rng) {
  const CMatrix v = haar_unitary(dim * env_dim, rng).leftCols(dim);
  std::vector<CMatrix> kraus;
  for (std::uint32_t e = 0; e < env_dim; ++e) kraus.push_back(v.block(e * dim, 0, dim, dim));
  return KrausChannel(std::move(kraus));
}

KrausChannel over_rotation(double angle, std::uint32_t d, std::uint32_t n) {
  const CMatrix x = gate(GateKind::X, d);
  const CMatrix site = 0.5 * (x + x.adjoint());
  const std::uint32_t dim = ipow(d, n);
  CMatrix g = CMatrix::Zero(dim, dim);
  for (std::uint32_t s = 0; s < n; ++s) g += embed_single(site, d, n, s);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g);
  CVector phases(dim);
  for (std::uint32_t i = 0; i < dim; ++i) phases(i) = std::polar(1.0, -angle * es.eigenvalues()(i));
  const CMatrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return KrausChannel::unitary(u);
}

nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("matrix JSON: expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = j[0].is_array() ? static_cast<Eigen::Index>(j[0].size()) : 0;
  if (cols == 0) throw InvalidArgument("matrix JSON: rows must be non-empty arrays");
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidArgument("matrix JSON: row " + std::to_string(r) + " has the wrong length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& e = row[c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw InvalidArgument("matrix JSON: entry (" + std::to_string(r) + ", " + std::to_string(c) +
                              ") is not a [re, im] pair");
      }
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

nlohmann::json channel_to_json(const KrausChannel& ch) {
  nlohmann::json kraus = nlohmann::json::array();
  for (const auto& k : ch.operators()) kraus.push_back(matrix_to_json(k));
  return {{"dim", ch.dim()}, {"kraus", std::move(kraus)}};
}

KrausChannel channel_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kraus")) throw InvalidArgument("channel JSON: missing \"kraus\"");
  std::vector<CMatrix> kraus;
  for (const auto& k : j.at("kraus")) kraus.push_back(matrix_from_json(k));
  if (kraus.empty()) throw InvalidArgument("channel JSON: empty Kraus list");
  if (j.contains("dim") && j.at("dim").get<std::int64_t>() != kraus.front().rows()) {
    throw DimensionMismatch("channel JSON: \"dim\" disagrees with the Kraus operators");
  }
  return KrausChannel(std::move(kraus));
}

}  // namespace qrb
