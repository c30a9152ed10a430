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

// Unitary-gate randomized benchmarking of qudit Clifford gates.
//
// For every length j = 2..m, k sequences are drawn: j-1 uniform Cliffords
// followed by the inverse of their composition. Each ideal gate is followed
// by the noise channel; the survival probability of the initial state is
// either evaluated exactly or estimated from l projective measurements.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qrb/channels.hpp"
#include "qrb/clifford.hpp"

namespace qrb {

inline constexpr const char* kCodeVersion = "0.1.0";

enum class RBMode { sampled, exact };

struct RBConfig {
  std::uint32_t qudits = 1;
  std::uint32_t dimension = 3;
  std::uint32_t max_length = 20;
  std::uint32_t sequences = 100;
  std::uint32_t copies = 1000;
  KrausChannel noise = KrausChannel::identity(3);
  std::optional<KrausChannel> spam_prep;
  std::optional<KrausChannel> spam_meas;
  std::uint64_t seed = 1;
  RBMode mode = RBMode::sampled;
  // Pure initial state; |0...0> when empty.
  std::optional<StateVector> initial_state;
  // Draw gates by index from an enumerated group (Cayley-table products)
  // when the group has at most this many elements; tableau sampling otherwise.
  std::size_t group_table_limit = 5000;

  std::uint32_t hilbert_dim() const;
  // Throws InvalidArgument/Unsupported describing the first problem found.
  void validate() const;
};

struct SequenceRecord {
  std::uint32_t length = 0;
  std::vector<CliffordTableau> gates;
  std::vector<std::uint32_t> gate_indices;  // empty unless drawn from a group table
  double survival = 0.0;
  std::uint64_t shots = 0;  // 0 in exact mode
};

struct LengthSummary {
  std::uint32_t length = 0;
  double mean_survival = 0.0;
  std::vector<SequenceRecord> sequences;
};

struct RBDataset {
  RBConfig config;
  std::vector<LengthSummary> per_length;  // lengths 2..max_length in order
  std::string code_version = kCodeVersion;

  std::vector<double> lengths() const;
  std::vector<double> means() const;
  // Total measurement shots per length (k * l in sampled mode).
  std::vector<double> shots() const;
};

// Prepared state and effective measurement effect after SPAM errors.
struct SpamModel {
  DensityMatrix rho;
  CMatrix effect;
};

SpamModel make_spam(const StateVector& psi, const std::optional<KrausChannel>& prep,
                    const std::optional<KrausChannel>& meas);

// j-1 uniform Cliffords and the inverse of their composition.
SequenceRecord generate_sequence(std::uint32_t length, std::uint32_t d, std::uint32_t n, Rng& rng);

// Same, drawing uniform indices and closing with inv(prod(...)).
SequenceRecord generate_sequence(std::uint32_t length, const CliffordGroupTable& group, Rng& rng);

// tr[E (noise o C_j) o ... o (noise o C_1)(rho)].
double exact_sequence_fidelity(const SequenceRecord& seq, const KrausChannel& noise, const DensityMatrix& rho,
                               const CMatrix& effect);

// Binomial(shots, q)/shots for q from exact_sequence_fidelity, clamped into
// [0, 1]. q below -1e-9 signals a broken channel and throws InternalError.
double sample_survival(const SequenceRecord& seq, const KrausChannel& noise, const SpamModel& spam,
                       std::uint64_t shots, Rng& rng);

// Clamp q into [0, 1] and draw the binomial estimate.
double sample_from_probability(double q, std::uint64_t shots, Rng& rng);

RBDataset run_rb(const RBConfig& config);

struct DecayPrediction {
  double A0 = 0.0;
  double B0 = 0.0;
  double p = 0.0;
  std::vector<double> curve;  // curve[j - 2] for j = 2..m

  double at(std::uint32_t length) const;
};

// A0 = tr[E noise(rho - 1/D)], B0 = tr[E noise(1)]/D and the model curve.
DecayPrediction predicted_decay(double p, const KrausChannel& noise, const SpamModel& spam, std::uint32_t max_length);

// Dataset as JSON (schema 1, fixed field order) and as CSV with columns
// length, seq_index, survival, shots.
nlohmann::ordered_json dataset_to_json(const RBDataset& data);
std::string dataset_to_csv(const RBDataset& data);

// Shortest decimal that round-trips the double.
std::string format_double(double v);

}  // namespace qrb
