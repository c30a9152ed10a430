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

// Experiment spec parsing and the command handlers behind the qrb tool.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrb/fitting.hpp"
#include "qrb/rb_protocol.hpp"

namespace qrb::cli {

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kInvalidInput = 2, kVerificationFailure = 3 };

// Parse failure pointing at a line (1-based) and, when known, a field.
class SpecError : public InvalidArgument {
 public:
  SpecError(std::size_t line, std::string field, const std::string& message);
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

enum class Weighting { none, inverse_variance };

struct ExperimentSpec {
  RBConfig config;
  std::filesystem::path out_dir = "qrb-out";
  bool emit_plot = false;
  bool log_plot = false;
  Weighting weighting = Weighting::none;
  // Human-readable noise descriptions for the report.
  std::string noise_label = "identity";
  std::string spam_prep_label;
  std::string spam_meas_label;
};

// Text is a flat `key = value` list with `#` comments; [noise], [spam_prep]
// and [spam_meas] sections select a channel model. Relative paths resolve
// against base_dir.
ExperimentSpec parse_spec(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentSpec load_spec(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  bool exact = false;
  std::optional<std::filesystem::path> out_dir;
  bool emit_plot = false;
};

struct RunReport {
  DecayFit fit;
  bool identifiable = true;
  double p_hat = 0.0;
  double r_hat = 0.0;
  nlohmann::ordered_json json;
};

// Fit a dataset; a flat curve yields p = 1 (or 0 when the level sits near
// the fully mixed value) with identifiable = false.
RunReport analyze(const RBDataset& data, Weighting weighting);

std::string render_svg(const RBDataset& data, const RunReport& report, bool log_y);

int cmd_run(const std::filesystem::path& spec_path, const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_verify(std::string_view suite, std::ostream& out, std::ostream& err);
int cmd_enumerate(std::uint32_t d, std::uint32_t n, const std::optional<std::filesystem::path>& cache,
                  std::ostream& out, std::ostream& err);

// Full command line, argv[0] included.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qrb::cli
