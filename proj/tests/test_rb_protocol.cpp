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

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "qrb/fitting.hpp"
#include "qrb/rb_protocol.hpp"

using namespace qrb;
using oracle::Mat;

namespace {

// Noisy propagation written out independently of the library.
double oracle_survival(const SequenceRecord& seq, const KrausChannel& noise, const Mat& rho, const Mat& effect) {
  Mat state = rho;
  for (const auto& g : seq.gates) {
    const Mat u = tableau_to_dense(g);
    state = u * state * u.adjoint();
    Mat next = Mat::Zero(state.rows(), state.cols());
    for (const auto& k : noise.operators()) next += k * state * k.adjoint();
    state = next;
  }
  return (effect * state).trace().real();
}

RBConfig qutrit_config(double p, RBMode mode, std::uint32_t m = 20) {
  RBConfig c;
  c.dimension = 3;
  c.qudits = 1;
  c.max_length = m;
  c.noise = depolarizing(p, 3);
  c.mode = mode;
  c.seed = 42;
  return c;
}

CliffordTableau total(const SequenceRecord& seq) {
  CliffordTableau acc = CliffordTableau::identity(seq.gates.front().d(), seq.gates.front().n());
  for (const auto& g : seq.gates) acc = compose(acc, g);
  return acc;
}

}  // namespace

TEST(Sequence, LengthTwoClosesWithInverse) {
  Rng rng(1);
  const auto seq = generate_sequence(2, 3, 1, rng);
  ASSERT_EQ(seq.gates.size(), 2u);
  EXPECT_EQ(seq.gates[1], invert(seq.gates[0]));
  EXPECT_TRUE(total(seq).is_identity());
  EXPECT_THROW(generate_sequence(1, 3, 1, rng), InvalidArgument);
}

TEST(Sequence, AlwaysComposesToIdentity) {
  Rng rng(2);
  const auto group = enumerate_group(3, 1);
  std::uniform_int_distribution<std::uint32_t> len(2, 30);
  for (int t = 0; t < 1000; ++t) {
    ASSERT_TRUE(total(generate_sequence(len(rng), 3, 1, rng)).is_identity());
    const auto indexed = generate_sequence(len(rng), group, rng);
    ASSERT_EQ(indexed.gate_indices.size(), indexed.length);
    ASSERT_TRUE(total(indexed).is_identity());
    std::uint32_t acc = 0;
    for (auto g : indexed.gate_indices) acc = group.prod(acc, g);
    ASSERT_EQ(acc, 0u);
  }
  for (int t = 0; t < 100; ++t) ASSERT_TRUE(total(generate_sequence(len(rng), 2, 2, rng)).is_identity());
}

TEST(Sequence, DenseProductIsIdentity) {
  Rng rng(5);
  const auto seq = generate_sequence(5, 2, 1, rng);
  Mat prod = Mat::Identity(2, 2);
  for (const auto& g : seq.gates) prod = tableau_to_dense(g) * prod;
  EXPECT_LT(oracle::phase_distance(prod, Mat::Identity(2, 2)), 1e-9);
}

TEST(ExactFidelity, NoiselessIsOne) {
  Rng rng(3);
  const auto spam = make_spam(basis_state(9, 0), std::nullopt, std::nullopt);
  for (int t = 0; t < 20; ++t) {
    const auto seq = generate_sequence(2 + t, 3, 2, rng);
    EXPECT_NEAR(exact_sequence_fidelity(seq, KrausChannel::identity(9), spam.rho, spam.effect), 1.0, 1e-10);
  }
}

TEST(ExactFidelity, DepolarizingClosedForm) {
  Rng rng(4);
  const auto spam = make_spam(basis_state(3, 0), std::nullopt, std::nullopt);
  for (std::uint32_t m : {2u, 5u, 17u, 50u}) {
    const auto seq = generate_sequence(m, 3, 1, rng);
    const double expected = std::pow(0.9, m) * (1 - 1.0 / 3) + 1.0 / 3;
    EXPECT_NEAR(exact_sequence_fidelity(seq, depolarizing(0.9, 3), spam.rho, spam.effect), expected, 1e-10);
  }
}

TEST(ExactFidelity, MatchesOraclePropagation) {
  Rng rng(6);
  const auto noise = random_channel(3, 2, rng);
  const auto spam = make_spam(basis_state(3, 0), depolarizing(0.9, 3), std::nullopt);
  for (int t = 0; t < 20; ++t) {
    const auto seq = generate_sequence(2 + t, 3, 1, rng);
    EXPECT_NEAR(exact_sequence_fidelity(seq, noise, spam.rho, spam.effect), oracle_survival(seq, noise, spam.rho, spam.effect),
                1e-12);
  }
}

TEST(ExactFidelity, DimensionMismatch) {
  Rng rng(7);
  const auto seq = generate_sequence(3, 3, 1, rng);
  const auto spam = make_spam(basis_state(3, 0), std::nullopt, std::nullopt);
  EXPECT_THROW(exact_sequence_fidelity(seq, depolarizing(0.9, 9), spam.rho, spam.effect), DimensionMismatch);
}

TEST(Sampling, Extremes) {
  Rng rng(8);
  EXPECT_EQ(sample_from_probability(1.0, 1000, rng), 1.0);
  EXPECT_EQ(sample_from_probability(0.0, 1000, rng), 0.0);
  EXPECT_EQ(sample_from_probability(-1e-12, 10, rng), 0.0);
  EXPECT_THROW(sample_from_probability(-1e-6, 10, rng), InternalError);
  EXPECT_THROW(sample_from_probability(0.5, 0, rng), InvalidArgument);
  const auto seq = generate_sequence(4, 3, 1, rng);
  const auto spam = make_spam(basis_state(3, 0), std::nullopt, std::nullopt);
  EXPECT_EQ(sample_survival(seq, KrausChannel::identity(3), spam, 1, rng), 1.0);
  EXPECT_EQ(sample_survival(seq, KrausChannel::identity(3), spam, 12345, rng), 1.0);
}

TEST(Sampling, BinomialConcentration) {
  Rng rng(9);
  const auto noise = depolarizing(0.9, 3);
  const auto spam = make_spam(basis_state(3, 0), std::nullopt, std::nullopt);
  const auto seq = generate_sequence(10, 3, 1, rng);
  const double q = oracle_survival(seq, noise, spam.rho, spam.effect);
  const double est = sample_survival(seq, noise, spam, 1'000'000, rng);
  EXPECT_LT(std::abs(est - q), 3 * std::sqrt(q * (1 - q) / 1e6));
}

TEST(RunRB, ExactDepolarizingMatchesClosedForm) {
  const auto data = run_rb(qutrit_config(0.95, RBMode::exact));
  ASSERT_EQ(data.per_length.size(), 19u);
  for (const auto& l : data.per_length) {
    const double expected = std::pow(0.95, l.length - 1) * 0.95 * (2.0 / 3) + 1.0 / 3;
    EXPECT_NEAR(l.mean_survival, expected, 1e-8) << "j=" << l.length;
    for (const auto& s : l.sequences) EXPECT_EQ(s.shots, 0u);
  }
}

TEST(RunRB, ExactDepolarizingUpToFifty) {
  auto c = qutrit_config(0.97, RBMode::exact, 50);
  c.sequences = 5;
  const auto data = run_rb(c);
  for (const auto& l : data.per_length) {
    EXPECT_NEAR(l.mean_survival, std::pow(0.97, l.length) * (2.0 / 3) + 1.0 / 3, 1e-8);
  }
}

TEST(RunRB, TableauPathForLargerGroups) {
  RBConfig c;
  c.dimension = 2;
  c.qudits = 2;
  c.max_length = 10;
  c.sequences = 5;
  c.noise = depolarizing(0.9, 4);
  c.mode = RBMode::exact;
  const auto data = run_rb(c);
  for (const auto& l : data.per_length) {
    EXPECT_TRUE(l.sequences.front().gate_indices.empty());
    EXPECT_NEAR(l.mean_survival, std::pow(0.9, l.length) * 0.75 + 0.25, 1e-10);
  }
}

TEST(RunRB, SampledWithinFiveStandardErrors) {
  const auto c = qutrit_config(0.95, RBMode::sampled);
  const auto data = run_rb(c);
  const double total_shots = static_cast<double>(c.sequences) * c.copies;
  for (const auto& l : data.per_length) {
    const double q = std::pow(0.95, l.length) * (2.0 / 3) + 1.0 / 3;
    EXPECT_LT(std::abs(l.mean_survival - q), 5 * std::sqrt(q * (1 - q) / total_shots)) << "j=" << l.length;
    for (const auto& s : l.sequences) EXPECT_EQ(s.shots, c.copies);
  }
}

TEST(RunRB, NoiselessIsOneInBothModes) {
  for (auto mode : {RBMode::exact, RBMode::sampled}) {
    auto c = qutrit_config(1.0, mode, 10);
    c.noise = KrausChannel::identity(3);
    c.sequences = 10;
    for (const auto& l : run_rb(c).per_length) EXPECT_NEAR(l.mean_survival, 1.0, 1e-10);
  }
}

TEST(RunRB, OverRotationAverageFollowsTwirlPrediction) {
  RBConfig c;
  c.dimension = 3;
  c.noise = over_rotation(0.2, 3, 1);
  c.mode = RBMode::exact;
  c.max_length = 10;
  c.sequences = 10000;
  c.seed = 77;
  const auto data = run_rb(c);
  const auto p = is_depolarizing(twirl(c.noise, enumerate_group(3, 1)), 1e-9);
  ASSERT_TRUE(p);
  const auto spam = make_spam(basis_state(3, 0), std::nullopt, std::nullopt);
  const auto pred = predicted_decay(*p, c.noise, spam, c.max_length);
  bool varied = false;
  for (const auto& l : data.per_length) {
    double mean = 0, sq = 0;
    for (const auto& s : l.sequences) mean += s.survival, sq += s.survival * s.survival;
    mean /= l.sequences.size();
    const double sd = std::sqrt(std::max(0.0, sq / l.sequences.size() - mean * mean));
    if (sd > 1e-6) varied = true;
    EXPECT_LT(std::abs(mean - pred.at(l.length)), 4 * sd / std::sqrt(double(l.sequences.size())) + 1e-12)
        << "j=" << l.length;
  }
  EXPECT_TRUE(varied);
}

TEST(RunRB, SpamShiftsCoefficientsNotBase) {
  auto clean = qutrit_config(0.9, RBMode::exact);
  auto noisy = clean;
  noisy.spam_prep = depolarizing(0.8, 3);
  noisy.spam_meas = depolarizing(0.95, 3);
  const auto a = run_rb(clean), b = run_rb(noisy);
  const auto fa = fit_decay(a.lengths(), a.means()), fb = fit_decay(b.lengths(), b.means());
  EXPECT_NEAR(fa.p, 0.9, 1e-8);
  EXPECT_NEAR(fb.p, fa.p, 1e-6);
  EXPECT_GT(std::abs(fa.A0 - fb.A0), 0.05);
}

TEST(RunRB, Determinism) {
  auto c = qutrit_config(0.9, RBMode::sampled, 12);
  c.sequences = 30;
  set_max_threads(1);
  const auto a = dataset_to_json(run_rb(c)).dump();
  set_max_threads(4);
  const auto b = dataset_to_json(run_rb(c)).dump();
  const auto b2 = dataset_to_json(run_rb(c)).dump();
  set_max_threads(0);
  EXPECT_EQ(a, b);
  EXPECT_EQ(b, b2);
  c.seed += 1;
  EXPECT_NE(dataset_to_json(run_rb(c)).dump(), a);
}

TEST(RunRB, ConfigValidation) {
  auto c = qutrit_config(0.9, RBMode::exact);
  c.dimension = 4;
  c.noise = depolarizing(0.9, 4);
  EXPECT_THROW(run_rb(c), Unsupported);
  c = qutrit_config(0.9, RBMode::exact);
  c.noise = depolarizing(0.9, 9);
  EXPECT_THROW(run_rb(c), DimensionMismatch);
  c = qutrit_config(0.9, RBMode::exact);
  c.sequences = 0;
  EXPECT_THROW(run_rb(c), InvalidArgument);
  c = qutrit_config(0.9, RBMode::exact);
  c.max_length = 1;
  EXPECT_THROW(run_rb(c), InvalidArgument);
  c = qutrit_config(0.9, RBMode::exact);
  c.initial_state = StateVector::Ones(3);
  EXPECT_THROW(run_rb(c), InvalidArgument);
}

TEST(RunRB, DatasetShape) {
  auto c = qutrit_config(0.9, RBMode::sampled, 8);
  c.sequences = 7;
  const auto data = run_rb(c);
  const auto j = dataset_to_json(data);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["provenance"]["seed"], 42u);
  ASSERT_EQ(j["lengths"].size(), 7u);
  for (std::size_t i = 0; i < data.per_length.size(); ++i) {
    const auto& l = data.per_length[i];
    EXPECT_EQ(l.length, i + 2);
    double sum = 0;
    for (const auto& s : l.sequences) {
      sum += s.survival;
      EXPECT_EQ(s.gate_indices.size(), l.length);
    }
    EXPECT_DOUBLE_EQ(l.mean_survival, sum / l.sequences.size());
  }
  std::istringstream csv(dataset_to_csv(data));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "length,seq_index,survival,shots");
  std::size_t rows = 0;
  for (const auto& l : j["lengths"]) {
    for (const auto& s : l["sequences"]) {
      ASSERT_TRUE(std::getline(csv, line));
      std::istringstream row(line);
      std::string f[4];
      for (auto& x : f) std::getline(row, x, ',');
      EXPECT_EQ(std::stoul(f[0]), l["length"].get<unsigned>());
      EXPECT_EQ(std::stoul(f[1]), s["seq_index"].get<unsigned>());
      EXPECT_EQ(std::stod(f[2]), s["survival"].get<double>());
      EXPECT_EQ(std::stoull(f[3]), s["shots"].get<unsigned long long>());
      ++rows;
    }
  }
  EXPECT_EQ(rows, 7u * 7u);
  EXPECT_FALSE(std::getline(csv, line));
}

TEST(Prediction, Examples) {
  const auto pure = make_spam(basis_state(3, 0), std::nullopt, std::nullopt);
  auto pr = predicted_decay(1.0, KrausChannel::identity(3), pure, 10);
  EXPECT_NEAR(pr.A0, 2.0 / 3, 1e-12);
  EXPECT_NEAR(pr.B0, 1.0 / 3, 1e-12);
  ASSERT_EQ(pr.curve.size(), 9u);

  const auto mixed = make_spam(basis_state(3, 0), depolarizing(0.0, 3), std::nullopt);
  pr = predicted_decay(0.8, depolarizing(0.8, 3), mixed, 10);
  EXPECT_NEAR(pr.A0, 0.0, 1e-12);
  for (double v : pr.curve) EXPECT_NEAR(v, pr.curve.front(), 1e-12);

  pr = predicted_decay(0.8, depolarizing(0.8, 3), pure, 10);
  EXPECT_NEAR(pr.A0, 0.8 * 2.0 / 3, 1e-12);
  EXPECT_NEAR(pr.B0, 1.0 / 3, 1e-12);
  EXPECT_NEAR(pr.at(4), 0.8 * 2.0 / 3 * std::pow(0.8, 3) + 1.0 / 3, 1e-12);
  EXPECT_THROW(predicted_decay(1.5, depolarizing(0.8, 3), pure, 10), InvalidArgument);
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3, 0.0, 1.0, 0.123456789012345678, 1e-300}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
}
