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

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qrb/channels.hpp"
#include "qrb/qudit_algebra.hpp"

using namespace qrb;
using oracle::Mat;

namespace {

constexpr double kPi = std::numbers::pi;
const std::uint32_t kPrimes[] = {2, 3, 5, 7};

Mat dense_pauli(std::uint32_t d, const std::vector<std::uint32_t>& x, const std::vector<std::uint32_t>& z) {
  Mat out = Mat::Identity(1, 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out = oracle::tensor(out, oracle::power(oracle::shift(d), x[i]) * oracle::power(oracle::clock(d), z[i]));
  }
  return out;
}

PauliOperator random_pauli(std::uint32_t d, std::uint32_t n, Rng& rng) {
  std::uniform_int_distribution<std::uint32_t> e(0, d - 1), ph(0, phase_modulus(d) - 1);
  std::vector<std::uint32_t> x(n), z(n);
  for (auto& v : x) v = e(rng);
  for (auto& v : z) v = e(rng);
  return PauliOperator(d, x, z, ph(rng));
}

}  // namespace

TEST(RootOfUnity, Values) {
  EXPECT_NEAR(std::abs(root_of_unity(2) - Complex(-1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(root_of_unity(4) - Complex(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(root_of_unity(3).real(), -0.5, 1e-7);
  EXPECT_NEAR(root_of_unity(3).imag(), 0.8660254, 1e-7);
  EXPECT_NEAR(std::abs(half_root_of_unity(2) - Complex(0, 1)), 0.0, 1e-15);
  EXPECT_THROW(root_of_unity(1), InvalidArgument);
  EXPECT_THROW(root_of_unity(0), InvalidArgument);
}

TEST(PhaseConvention, ModulusDoublesForEvenDimension) {
  EXPECT_EQ(phase_modulus(2), 4u);
  EXPECT_EQ(phase_modulus(3), 3u);
  EXPECT_EQ(phase_modulus(5), 5u);
  EXPECT_NEAR(std::abs(std::pow(phase_unit(2), 2) - root_of_unity(2)), 0.0, 1e-15);
}

TEST(Gate, ShiftOnQutrit) {
  const CMatrix x = gate(GateKind::X, 3);
  EXPECT_NEAR(std::abs(x(1, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(x(0, 2) - 1.0), 0.0, 1e-15);
  EXPECT_LT(max_abs_diff(x, oracle::shift(3)), 1e-15);
}

TEST(Gate, FourierAtTwoIsHadamard) {
  Mat h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  EXPECT_LT(max_abs_diff(gate(GateKind::F, 2), h), 1e-15);
  for (auto d : kPrimes) EXPECT_LT(max_abs_diff(gate(GateKind::F, d), oracle::fourier(d)), 1e-12);
}

TEST(Gate, QutritPhaseGate) {
  const Complex w = oracle::omega(3);
  Mat expected = Mat::Zero(3, 3);
  expected.diagonal() << 1.0, w, 1.0;
  EXPECT_LT(max_abs_diff(gate(GateKind::P, 3), expected), 1e-12);
}

TEST(Gate, QubitPhaseGateUsesHalfRoot) {
  Mat s = Mat::Zero(2, 2);
  s(0, 0) = 1.0;
  s(1, 1) = Complex(0, 1);
  EXPECT_LT(max_abs_diff(gate(GateKind::P, 2), s), 1e-12);
}

TEST(Gate, ControlledZQutrit) {
  const CMatrix cz = gate(GateKind::CZ, 3);
  ASSERT_EQ(cz.rows(), 9);
  const Complex w = oracle::omega(3);
  // |12> has index 1*3 + 2
  EXPECT_NEAR(std::abs(cz(5, 5) - w * w), 0.0, 1e-12);
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < 3; ++t) EXPECT_NEAR(std::abs(cz(3 * s + t, 3 * s + t) - std::pow(w, s * t)), 0.0, 1e-12);
  }
}

TEST(Gate, AllUnitary) {
  for (auto d : kPrimes) {
    for (auto k : {GateKind::X, GateKind::Z, GateKind::F, GateKind::P, GateKind::CZ, GateKind::T}) {
      EXPECT_TRUE(is_unitary(gate(k, d), 1e-12)) << gate_name(k) << " d=" << d;
    }
  }
}

TEST(Gate, TGateQutrit) {
  const CMatrix t = gate(GateKind::T, 3);
  for (int s = 0; s < 3; ++s) {
    EXPECT_NEAR(std::abs(t(s, s) - std::polar(1.0, 2 * kPi * s * s * s / 27.0)), 0.0, 1e-12);
  }
}

TEST(Gate, UnknownKind) {
  EXPECT_THROW(parse_gate_kind("Y"), InvalidArgument);
  EXPECT_EQ(parse_gate_kind("CZ"), GateKind::CZ);
}

TEST(Gate, OrderAndCommutation) {
  for (auto d : kPrimes) {
    const CMatrix x = gate(GateKind::X, d), z = gate(GateKind::Z, d);
    const CMatrix id = CMatrix::Identity(d, d);
    EXPECT_LT(max_abs_diff(oracle::power(x, d), id), 1e-10);
    EXPECT_LT(max_abs_diff(oracle::power(z, d), id), 1e-10);
    EXPECT_LT(max_abs_diff(z * x, root_of_unity(d) * x * z), 1e-12);
  }
}

TEST(PauliProduct, ZTimesXReorders) {
  const auto z = PauliOperator::z_on(3, 1, 0), x = PauliOperator::x_on(3, 1, 0);
  const auto prod = pauli_product(z, x);
  EXPECT_EQ(prod.x(), std::vector<std::uint32_t>{1});
  EXPECT_EQ(prod.z(), std::vector<std::uint32_t>{1});
  EXPECT_EQ(prod.phase(), 1u);
}

TEST(PauliProduct, IdentityIsNeutral) {
  Rng rng(5);
  const auto p = random_pauli(3, 2, rng);
  EXPECT_EQ(pauli_product(p, PauliOperator(3, 2)), p);
  EXPECT_EQ(pauli_product(PauliOperator(3, 2), p), p);
}

TEST(PauliProduct, QubitXZSquared) {
  const PauliOperator xz(2, {1}, {1});
  const auto sq = pauli_product(xz, xz);
  EXPECT_TRUE(sq.is_identity_up_to_phase());
  EXPECT_EQ(sq.phase(), 2u);
  const Mat oracle_xz = oracle::shift(2) * oracle::clock(2);
  EXPECT_LT(max_abs_diff(oracle_xz * oracle_xz, -Mat::Identity(2, 2)), 1e-15);
}

TEST(PauliProduct, DimensionMismatch) {
  EXPECT_THROW(pauli_product(PauliOperator(3, 1), PauliOperator(3, 2)), DimensionMismatch);
  EXPECT_THROW(pauli_product(PauliOperator(3, 1), PauliOperator(5, 1)), DimensionMismatch);
}

TEST(PauliToDense, Examples) {
  EXPECT_LT(max_abs_diff(pauli_to_dense(PauliOperator(3, {1}, {0}, 0)), oracle::shift(3)), 1e-15);
  const Complex w = oracle::omega(3);
  EXPECT_LT(max_abs_diff(pauli_to_dense(PauliOperator(3, {0}, {1}, 1)), w * oracle::clock(3)), 1e-12);
  EXPECT_LT(max_abs_diff(pauli_to_dense(PauliOperator(2, {1}, {1}, 0)), oracle::shift(2) * oracle::clock(2)), 1e-15);
}

TEST(PauliToDense, MatchesOracleOnTwoQudits) {
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    const auto p = random_pauli(3, 2, rng);
    const Mat expected = std::pow(phase_unit(3), p.phase()) * dense_pauli(3, p.x(), p.z());
    EXPECT_LT(max_abs_diff(pauli_to_dense(p), expected), 1e-12);
  }
}

TEST(PauliProduct, AssociativeAndHomomorphic) {
  const std::pair<std::uint32_t, std::uint32_t> cases[] = {{2, 2}, {3, 1}, {3, 2}, {5, 1}};
  Rng rng(2024);
  for (auto [d, n] : cases) {
    for (int t = 0; t < 1000; ++t) {
      const auto a = random_pauli(d, n, rng), b = random_pauli(d, n, rng), c = random_pauli(d, n, rng);
      ASSERT_EQ(pauli_product(pauli_product(a, b), c), pauli_product(a, pauli_product(b, c)));
      const CMatrix ab = pauli_to_dense(pauli_product(a, b));
      ASSERT_LT(max_abs_diff(ab, pauli_to_dense(a) * pauli_to_dense(b)), 1e-10) << "d=" << d << " n=" << n;
    }
  }
}

TEST(PauliProduct, SymplecticFormGivesCommutationPhase) {
  Rng rng(3);
  for (std::uint32_t d : {2u, 3u, 5u}) {
    for (int t = 0; t < 100; ++t) {
      const auto p = random_pauli(d, 2, rng), q = random_pauli(d, 2, rng);
      const CMatrix pq = pauli_to_dense(p) * pauli_to_dense(q);
      const CMatrix qp = pauli_to_dense(q) * pauli_to_dense(p);
      const Complex w = std::pow(root_of_unity(d), -static_cast<double>(symplectic_form(p, q)));
      ASSERT_LT(max_abs_diff(pq, w * qp), 1e-10);
    }
  }
}

TEST(PauliMembership, Examples) {
  const auto x = pauli_membership(oracle::shift(3), 3, 1);
  ASSERT_TRUE(x);
  EXPECT_EQ(x->x, std::vector<std::uint32_t>{1});
  EXPECT_EQ(x->z, std::vector<std::uint32_t>{0});
  EXPECT_NEAR(x->theta, 0.0, 1e-12);

  const auto z = pauli_membership(std::polar(1.0, kPi / 7) * oracle::clock(3), 3, 1);
  ASSERT_TRUE(z);
  EXPECT_EQ(z->x, std::vector<std::uint32_t>{0});
  EXPECT_EQ(z->z, std::vector<std::uint32_t>{1});
  EXPECT_NEAR(z->theta, kPi / 7, 1e-12);

  EXPECT_FALSE(pauli_membership(oracle::fourier(3), 3, 1));
  EXPECT_THROW(pauli_membership(Mat::Identity(3, 3), 3, 2), DimensionMismatch);
  EXPECT_THROW(pauli_membership(Mat::Identity(3, 2), 3, 1), DimensionMismatch);
}

TEST(PauliMembership, RecoversEverySingleQuditPauli) {
  for (std::uint32_t d : {2u, 3u, 5u}) {
    for (std::uint32_t a = 0; a < d; ++a) {
      for (std::uint32_t b = 0; b < d; ++b) {
        const auto m = pauli_membership(pauli_to_dense(PauliOperator(d, {a}, {b}, 1)), d, 1);
        ASSERT_TRUE(m);
        EXPECT_EQ(m->x[0], a);
        EXPECT_EQ(m->z[0], b);
      }
    }
  }
}

TEST(SymmetricBlock, HadamardPair) {
  const Mat h = oracle::fourier(2);
  const auto block = symmetric_block(oracle::tensor(h, h));
  const double s = std::sqrt(2.0);
  Mat r(3, 3);
  r << 1, s, 1, s, 0, -s, 1, -s, 1;
  r /= 2.0;
  EXPECT_LT(max_abs_diff(block.sym, r), 1e-12);
  EXPECT_NEAR(std::abs(block.antisym - Complex(-1, 0)), 0.0, 1e-12);
  EXPECT_NEAR(block.offdiag_norm, 0.0, 1e-12);
}

TEST(SymmetricBlock, Identity) {
  const auto block = symmetric_block(Mat::Identity(4, 4));
  EXPECT_LT(max_abs_diff(block.sym, Mat::Identity(3, 3)), 1e-15);
  EXPECT_NEAR(std::abs(block.antisym - 1.0), 0.0, 1e-15);
  EXPECT_EQ(block.offdiag_norm, 0.0);
}

TEST(SymmetricBlock, CnotCouplesSectors) {
  Mat cnot = Mat::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  // explicit basis change
  const double s = 1.0 / std::sqrt(2.0);
  Mat basis = Mat::Zero(4, 4);
  basis(0, 0) = 1;
  basis(1, 1) = s;
  basis(2, 1) = s;
  basis(3, 2) = 1;
  basis(1, 3) = s;
  basis(2, 3) = -s;
  const Mat v = basis.adjoint() * cnot * basis;
  const double expected = std::sqrt(v.topRightCorner(3, 1).squaredNorm() + v.bottomLeftCorner(1, 3).squaredNorm());
  const auto block = symmetric_block(cnot);
  EXPECT_GT(block.offdiag_norm, 0.1);
  EXPECT_NEAR(block.offdiag_norm, expected, 1e-12);
}

TEST(SymmetricBlock, RejectsBadInput) {
  EXPECT_THROW(symmetric_block(Mat::Identity(3, 3)), DimensionMismatch);
  EXPECT_THROW(symmetric_block(2.0 * Mat::Identity(4, 4)), InvalidArgument);
}

TEST(SymmetricBlock, ProductsOfEqualFactorsNeverCouple) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 100; ++t) {
    const Mat u = oracle::haar(2, rng);
    EXPECT_LT(symmetric_block(oracle::tensor(u, u)).offdiag_norm, 1e-12);
  }
}

TEST(Counterexample, ConjugatedShiftIsNotPauli) {
  const Mat h = oracle::fourier(2);
  const Mat r = symmetric_block(oracle::tensor(h, h)).sym;
  const Mat x = oracle::shift(3);
  EXPECT_FALSE(pauli_membership(r * x * r.adjoint(), 3, 1));
  // R is real symmetric and squares to one, so the undaggered form is the same matrix
  EXPECT_LT(max_abs_diff(r * x * r, r * x * r.adjoint()), 1e-15);
  EXPECT_FALSE(pauli_membership(r * x * r, 3, 1));
}

TEST(States, BasisAndDensity) {
  const auto psi = basis_state(9, 5);
  EXPECT_EQ(psi(5), Complex(1, 0));
  const auto rho = pure_density(psi);
  EXPECT_NO_THROW(check_density_matrix(rho));
  EXPECT_THROW(check_density_matrix(2.0 * rho), InvalidArgument);
  EXPECT_THROW(basis_state(3, 3), InvalidArgument);
}
