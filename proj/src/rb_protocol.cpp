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

#include "qrb/rb_protocol.hpp"

#include <charconv>
#include <random>
#include <sstream>

#include "qrb/qudit_algebra.hpp"

namespace qrb {

namespace {

// tr[E (noise o U_j) o ... o (noise o U_1)(rho)].
double propagate(const std::vector<const CMatrix*>& gates, const KrausChannel& noise, const DensityMatrix& rho,
                 const CMatrix& effect) {
  DensityMatrix state = rho;
  for (const CMatrix* u : gates) {
    state = apply_channel(noise, (*u) * state * u->adjoint());
  }
  return (effect * state).trace().real();
}

void check_spam(const SpamModel& spam, std::uint32_t dim) {
  if (spam.rho.rows() != dim || spam.rho.cols() != dim || spam.effect.rows() != dim || spam.effect.cols() != dim) {
    throw DimensionMismatch("SPAM model dimension differs from the noise channel");
  }
}

nlohmann::ordered_json state_to_json(const StateVector& psi) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < psi.size(); ++i) out.push_back({psi(i).real(), psi(i).imag()});
  return out;
}

nlohmann::ordered_json optional_channel(const std::optional<KrausChannel>& ch) {
  if (!ch) return nullptr;
  return channel_to_json(*ch);
}

}  // namespace

std::uint32_t RBConfig::hilbert_dim() const { return ipow(dimension, qudits); }

void RBConfig::validate() const {
  if (qudits == 0) throw InvalidArgument("qudits must be positive");
  if (!is_prime(dimension)) {
    throw Unsupported("dimension " + std::to_string(dimension) +
                      " is not prime; only prime qudit dimensions are supported");
  }
  if (max_length < 2) throw InvalidArgument("max_length must be at least 2");
  if (sequences == 0) throw InvalidArgument("sequences must be positive");
  if (copies == 0) throw InvalidArgument("copies must be positive");
  const std::uint32_t dim = hilbert_dim();
  if (noise.dim() != dim) {
    throw DimensionMismatch("noise channel acts on dimension " + std::to_string(noise.dim()) + ", expected d^n = " +
                            std::to_string(dim));
  }
  if (spam_prep && spam_prep->dim() != dim) throw DimensionMismatch("preparation channel has the wrong dimension");
  if (spam_meas && spam_meas->dim() != dim) throw DimensionMismatch("measurement channel has the wrong dimension");
  if (initial_state) {
    if (initial_state->size() != dim) throw DimensionMismatch("initial state has the wrong dimension");
    if (std::abs(initial_state->norm() - 1.0) > 1e-12) throw InvalidArgument("initial state is not normalized");
  }
}

std::vector<double> RBDataset::lengths() const {
  std::vector<double> out;
  for (const auto& l : per_length) out.push_back(l.length);
  return out;
}

std::vector<double> RBDataset::means() const {
  std::vector<double> out;
  for (const auto& l : per_length) out.push_back(l.mean_survival);
  return out;
}

std::vector<double> RBDataset::shots() const {
  std::vector<double> out;
  for (const auto& l : per_length) {
    double total = 0.0;
    for (const auto& s : l.sequences) total += static_cast<double>(s.shots);
    out.push_back(total);
  }
  return out;
}

SpamModel make_spam(const StateVector& psi, const std::optional<KrausChannel>& prep,
                    const std::optional<KrausChannel>& meas) {
  const DensityMatrix ideal = pure_density(psi);
  SpamModel spam{ideal, ideal};
  if (prep) spam.rho = apply_channel(*prep, ideal);
  if (meas) spam.effect = apply_adjoint(*meas, ideal);
  return spam;
}

SequenceRecord generate_sequence(std::uint32_t length, std::uint32_t d, std::uint32_t n, Rng& rng) {
  if (length < 2) throw InvalidArgument("generate_sequence: length must be at least 2");
  SequenceRecord seq;
  seq.length = length;
  seq.gates.reserve(length);
  CliffordTableau total = CliffordTableau::identity(d, n);
  for (std::uint32_t i = 0; i + 1 < length; ++i) {
    seq.gates.push_back(random_clifford(d, n, rng));
    total = compose(total, seq.gates.back());
  }
  seq.gates.push_back(invert(total));
  return seq;
}

SequenceRecord generate_sequence(std::uint32_t length, const CliffordGroupTable& group, Rng& rng) {
  if (length < 2) throw InvalidArgument("generate_sequence: length must be at least 2");
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(group.size() - 1));
  SequenceRecord seq;
  seq.length = length;
  std::uint32_t current = 0;
  for (std::uint32_t i = 0; i + 1 < length; ++i) {
    const std::uint32_t g = pick(rng);
    seq.gate_indices.push_back(g);
    current = group.prod(current, g);
  }
  seq.gate_indices.push_back(group.inv(current));
  for (auto idx : seq.gate_indices) seq.gates.push_back(group.element(idx));
  return seq;
}

double exact_sequence_fidelity(const SequenceRecord& seq, const KrausChannel& noise, const DensityMatrix& rho,
                               const CMatrix& effect) {
  check_spam(SpamModel{rho, effect}, noise.dim());
  std::vector<CMatrix> dense;
  dense.reserve(seq.gates.size());
  for (const auto& g : seq.gates) {
    if (ipow(g.d(), g.n()) != noise.dim()) throw DimensionMismatch("exact_sequence_fidelity: gate dimension mismatch");
    dense.push_back(tableau_to_dense(g));
  }
  std::vector<const CMatrix*> ptrs;
  for (const auto& u : dense) ptrs.push_back(&u);
  return propagate(ptrs, noise, rho, effect);
}

double sample_from_probability(double q, std::uint64_t shots, Rng& rng) {
  if (shots == 0) throw InvalidArgument("sample_survival: shots must be positive");
  if (q < -1e-9 || q > 1.0 + 1e-9) {
    throw InternalError("survival probability " + std::to_string(q) + " outside [0, 1]; channel is not CPTP");
  }
  q = std::clamp(q, 0.0, 1.0);
  std::binomial_distribution<std::uint64_t> draw(shots, q);
  return static_cast<double>(draw(rng)) / static_cast<double>(shots);
}

double sample_survival(const SequenceRecord& seq, const KrausChannel& noise, const SpamModel& spam,
                       std::uint64_t shots, Rng& rng) {
  const double q = exact_sequence_fidelity(seq, noise, spam.rho, spam.effect);
  return sample_from_probability(q, shots, rng);
}

RBDataset run_rb(const RBConfig& config) {
  config.validate();
  const std::uint32_t d = config.dimension, n = config.qudits;
  const std::uint32_t dim = config.hilbert_dim();

  std::optional<CliffordGroupTable> group;
  std::vector<DenseUnitary> group_dense;
  std::uint64_t order = 0;
  try {
    order = clifford_group_order(d, n);
  } catch (const SizeError&) {
    order = 0;
  }
  if (order != 0 && order <= config.group_table_limit) {
    group.emplace(enumerate_group(d, n));
    group_dense = group->dense_elements();
  }

  const StateVector psi = config.initial_state ? *config.initial_state : basis_state(dim, 0);
  const SpamModel spam = make_spam(psi, config.spam_prep, config.spam_meas);

  RBDataset data;
  data.config = config;
  const std::uint32_t k = config.sequences;
  const std::uint32_t lengths = config.max_length - 1;
  data.per_length.resize(lengths);
  for (std::uint32_t li = 0; li < lengths; ++li) {
    data.per_length[li].length = li + 2;
    data.per_length[li].sequences.resize(k);
  }

  parallel_for(static_cast<std::size_t>(lengths) * k, [&](std::size_t task) {
    const auto li = static_cast<std::uint32_t>(task / k);
    const auto s = static_cast<std::uint32_t>(task % k);
    const std::uint32_t j = li + 2;
    Rng rng(stream_seed(config.seed, j, s));
    SequenceRecord seq = group ? generate_sequence(j, *group, rng) : generate_sequence(j, d, n, rng);

    double q = 0.0;
    if (group) {
      std::vector<const CMatrix*> gates;
      for (auto idx : seq.gate_indices) gates.push_back(&group_dense[idx]);
      q = propagate(gates, config.noise, spam.rho, spam.effect);
    } else {
      q = exact_sequence_fidelity(seq, config.noise, spam.rho, spam.effect);
    }
    if (config.mode == RBMode::exact) {
      seq.survival = q;
      seq.shots = 0;
    } else {
      seq.survival = sample_from_probability(q, config.copies, rng);
      seq.shots = config.copies;
    }
    data.per_length[li].sequences[s] = std::move(seq);
  });

  for (auto& l : data.per_length) {
    double sum = 0.0;
    for (const auto& s : l.sequences) sum += s.survival;
    l.mean_survival = sum / static_cast<double>(l.sequences.size());
  }
  return data;
}

double DecayPrediction::at(std::uint32_t length) const {
  return A0 * std::pow(p, static_cast<double>(length) - 1.0) + B0;
}

DecayPrediction predicted_decay(double p, const KrausChannel& noise, const SpamModel& spam, std::uint32_t max_length) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("predicted_decay: p must lie in [0, 1]");
  const std::uint32_t dim = noise.dim();
  check_spam(spam, dim);
  const CMatrix id = CMatrix::Identity(dim, dim);
  DecayPrediction out;
  out.p = p;
  out.A0 = (spam.effect * apply_channel(noise, spam.rho - id / static_cast<double>(dim))).trace().real();
  out.B0 = (spam.effect * apply_channel(noise, id)).trace().real() / dim;
  for (std::uint32_t j = 2; j <= max_length; ++j) out.curve.push_back(out.at(j));
  return out;
}

nlohmann::ordered_json dataset_to_json(const RBDataset& data) {
  const RBConfig& c = data.config;
  nlohmann::ordered_json j;
  j["schema"] = 1;
  nlohmann::ordered_json cfg;
  cfg["qudits"] = c.qudits;
  cfg["dimension"] = c.dimension;
  cfg["max_length"] = c.max_length;
  cfg["sequences"] = c.sequences;
  cfg["copies"] = c.copies;
  cfg["mode"] = c.mode == RBMode::exact ? "exact" : "sampled";
  cfg["seed"] = c.seed;
  cfg["noise"] = channel_to_json(c.noise);
  cfg["spam_prep"] = optional_channel(c.spam_prep);
  cfg["spam_meas"] = optional_channel(c.spam_meas);
  cfg["initial_state"] = c.initial_state ? state_to_json(*c.initial_state) : nlohmann::ordered_json(nullptr);
  j["config"] = std::move(cfg);
  nlohmann::ordered_json prov;
  prov["seed"] = c.seed;
  prov["rng"] = "mt19937_64 per (length, sequence) stream, seeded by splitmix64(seed, length, sequence)";
  prov["code_version"] = data.code_version;
  j["provenance"] = std::move(prov);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& l : data.per_length) {
    nlohmann::ordered_json entry;
    entry["length"] = l.length;
    entry["mean_survival"] = l.mean_survival;
    nlohmann::ordered_json seqs = nlohmann::ordered_json::array();
    for (std::size_t s = 0; s < l.sequences.size(); ++s) {
      const auto& rec = l.sequences[s];
      nlohmann::ordered_json r;
      r["seq_index"] = s;
      r["survival"] = rec.survival;
      r["shots"] = rec.shots;
      if (!rec.gate_indices.empty()) r["gate_indices"] = rec.gate_indices;
      seqs.push_back(std::move(r));
    }
    entry["sequences"] = std::move(seqs);
    rows.push_back(std::move(entry));
  }
  j["lengths"] = std::move(rows);
  return j;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw InternalError("format_double: conversion failed");
  return std::string(buf, end);
}

std::string dataset_to_csv(const RBDataset& data) {
  std::ostringstream os;
  os << "length,seq_index,survival,shots\n";
  for (const auto& l : data.per_length) {
    for (std::size_t s = 0; s < l.sequences.size(); ++s) {
      os << l.length << ',' << s << ',' << format_double(l.sequences[s].survival) << ',' << l.sequences[s].shots << '\n';
    }
  }
  return os.str();
}

}  // namespace qrb
