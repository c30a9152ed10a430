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

// Least-squares fit of the survival decay F(j) = A0 p^(j-1) + B0.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "qrb/common.hpp"

namespace qrb {

// The data do not determine p: the curve is flat to within its noise.
class FlatCurveError : public Error {
 public:
  using Error::Error;
};

struct DecayFit {
  double A0 = 0.0;
  double p = 0.0;
  double B0 = 0.0;
  double residual_rms = 0.0;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();  // order (A0, p, B0)
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;

  double model(double length) const;
};

struct FitOptions {
  int max_iterations = 500;
  double step_tolerance = 1e-12;
  double gradient_tolerance = 1e-12;
};

// Weighted least squares for the decay model with p kept in [0, 1].
// `weights` (inverse variances) are optional; unweighted otherwise. Needs at
// least four distinct lengths.
DecayFit fit_decay(std::span<const double> lengths, std::span<const double> means,
                   std::optional<std::span<const double>> weights = std::nullopt,
                   const FitOptions& options = {});

// Binomial inverse variances shots / (F (1 - F)), with F clamped away from
// 0 and 1 by half a shot.
std::vector<double> inverse_variance_weights(std::span<const double> means, std::span<const double> shots);

// r = (1 - p)(1 - 1/d^n).
double error_rate_from_p(double p, std::uint32_t d, std::uint32_t n);
double p_from_error_rate(double r, std::uint32_t d, std::uint32_t n);

// F = p + (1 - p)/d^n.
double average_fidelity_from_p(double p, std::uint32_t d, std::uint32_t n);

nlohmann::ordered_json fit_to_json(const DecayFit& fit);

}  // namespace qrb
