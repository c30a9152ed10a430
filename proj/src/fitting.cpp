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

#include "qrb/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>

namespace qrb {

namespace {

struct Data {
  Eigen::VectorXd j;     // lengths, ascending
  Eigen::VectorXd y;     // means
  Eigen::VectorXd sqrt_w;
};

double model_value(double a, double p, double b, double j) { return a * std::pow(p, j - 1.0) + b; }

Eigen::VectorXd residuals(const Data& data, const Eigen::Vector3d& theta) {
  Eigen::VectorXd r(data.y.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    r(i) = data.sqrt_w(i) * (data.y(i) - model_value(theta(0), theta(1), theta(2), data.j(i)));
  }
  return r;
}

// Jacobian of the weighted model values.
Eigen::MatrixXd jacobian(const Data& data, const Eigen::Vector3d& theta) {
  Eigen::MatrixXd jac(data.y.size(), 3);
  const double a = theta(0), p = theta(1);
  for (Eigen::Index i = 0; i < jac.rows(); ++i) {
    const double e = data.j(i) - 1.0;
    const double w = data.sqrt_w(i);
    jac(i, 0) = w * std::pow(p, e);
    jac(i, 1) = e > 0.0 ? w * a * e * std::pow(p, e - 1.0) : 0.0;
    jac(i, 2) = w;
  }
  return jac;
}

// Best (A, B) for a fixed p by weighted linear least squares.
Eigen::Vector3d linear_amplitudes(const Data& data, double p) {
  Eigen::MatrixXd basis(data.y.size(), 2);
  for (Eigen::Index i = 0; i < basis.rows(); ++i) {
    basis(i, 0) = data.sqrt_w(i) * std::pow(p, data.j(i) - 1.0);
    basis(i, 1) = data.sqrt_w(i);
  }
  const Eigen::VectorXd rhs = data.sqrt_w.cwiseProduct(data.y);
  const Eigen::Vector2d ab = basis.colPivHouseholderQr().solve(rhs);
  return {ab(0), p, ab(1)};
}

// Tail mean for B0, log-slope of the head for p, then A0 from the first point.
Eigen::Vector3d heuristic_start(const Data& data) {
  const Eigen::Index n = data.y.size();
  const Eigen::Index tail = std::max<Eigen::Index>(2, n / 5);
  const double b = data.y.tail(tail).mean();
  const double sign = data.y(0) >= b ? 1.0 : -1.0;
  std::vector<double> xs, ls;
  for (Eigen::Index i = 0; i < std::max<Eigen::Index>(2, n / 2); ++i) {
    const double v = sign * (data.y(i) - b);
    if (v > 0.0) {
      xs.push_back(data.j(i));
      ls.push_back(std::log(v));
    }
  }
  double p = 0.9;
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double ml = std::accumulate(ls.begin(), ls.end(), 0.0) / ls.size();
    double sxx = 0.0, sxl = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sxx += (xs[k] - mx) * (xs[k] - mx);
      sxl += (xs[k] - mx) * (ls[k] - ml);
    }
    if (sxx > 0.0) p = std::exp(sxl / sxx);
  }
  p = std::clamp(p, 1e-3, 1.0 - 1e-9);
  const double a = (data.y(0) - b) / std::pow(p, data.j(0) - 1.0);
  return {a, p, b};
}

Eigen::Vector3d clamp_params(Eigen::Vector3d theta) {
  theta(1) = std::clamp(theta(1), 0.0, 1.0);
  return theta;
}

// Gradient of the cost with components pushing p out of [0, 1] removed.
double projected_gradient_norm(const Eigen::MatrixXd& jac, const Eigen::VectorXd& r, const Eigen::Vector3d& theta) {
  Eigen::Vector3d g = -jac.transpose() * r;
  if (theta(1) >= 1.0 && g(1) < 0.0) g(1) = 0.0;
  if (theta(1) <= 0.0 && g(1) > 0.0) g(1) = 0.0;
  return g.norm();
}

}  // namespace

double DecayFit::model(double length) const { return model_value(A0, p, B0, length); }

DecayFit fit_decay(std::span<const double> lengths, std::span<const double> means,
                   std::optional<std::span<const double>> weights, const FitOptions& options) {
  if (lengths.size() != means.size()) throw DimensionMismatch("fit_decay: lengths and means differ in size");
  if (weights && weights->size() != means.size()) throw DimensionMismatch("fit_decay: weights differ in size");
  const std::size_t n = lengths.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });

  Data data{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd::Ones(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    if (!(lengths[i] >= 1.0)) throw InvalidArgument("fit_decay: sequence lengths must be >= 1");
    if (!(means[i] >= -1e-12 && means[i] <= 1.0 + 1e-12)) throw InvalidArgument("fit_decay: means must lie in [0, 1]");
    data.j(k) = lengths[i];
    data.y(k) = means[i];
    if (weights) {
      const double w = (*weights)[i];
      if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("fit_decay: weights must be positive and finite");
      data.sqrt_w(k) = std::sqrt(w);
    }
  }
  std::size_t distinct = n == 0 ? 0 : 1;
  for (std::size_t k = 1; k < n; ++k) distinct += data.j(k) != data.j(k - 1);
  if (distinct < 4) throw InvalidArgument("fit_decay: need at least 4 distinct lengths");

  double noise = 0.0;
  if (weights) {
    std::vector<double> se(n);
    for (std::size_t k = 0; k < n; ++k) se[k] = 1.0 / data.sqrt_w(k);
    std::nth_element(se.begin(), se.begin() + n / 2, se.end());
    noise = se[n / 2];
  }
  const double range = data.y.maxCoeff() - data.y.minCoeff();
  if (range <= std::max(1e-12, 10.0 * noise)) {
    throw FlatCurveError("fit_decay: survival curve is flat (range " + std::to_string(range) +
                         "); p is unidentifiable because A0 = 0");
  }

  auto cost_of = [&](const Eigen::Vector3d& theta) { return 0.5 * residuals(data, theta).squaredNorm(); };

  Eigen::Vector3d theta = heuristic_start(data);
  double cost = cost_of(theta);
  for (double p0 : {0.05, 0.2, 0.4, 0.6, 0.75, 0.85, 0.9, 0.95, 0.98, 0.99, 0.995, 0.999}) {
    const Eigen::Vector3d cand = linear_amplitudes(data, p0);
    const double c = cost_of(cand);
    if (c < cost) {
      cost = c;
      theta = cand;
    }
  }

  DecayFit fit;
  double lambda = 1e-3;
  Eigen::MatrixXd jac = jacobian(data, theta);
  Eigen::VectorXd r = residuals(data, theta);
  for (fit.iterations = 0; fit.iterations < options.max_iterations; ++fit.iterations) {
    if (projected_gradient_norm(jac, r, theta) < options.gradient_tolerance) {
      fit.converged = true;
      break;
    }
    Eigen::Vector3d scale = jac.colwise().norm().transpose();
    scale = scale.cwiseMax(1e-12);
    Eigen::MatrixXd stacked(jac.rows() + 3, 3);
    stacked.topRows(jac.rows()) = jac;
    stacked.bottomRows(3) = (std::sqrt(lambda) * scale).asDiagonal();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(jac.rows() + 3);
    rhs.head(r.size()) = r;
    const Eigen::Vector3d step = stacked.colPivHouseholderQr().solve(rhs);
    const Eigen::Vector3d trial = clamp_params(theta + step);
    const double moved = (trial - theta).norm() / (theta.norm() + 1e-300);
    if (moved < options.step_tolerance) {
      fit.converged = true;
      break;
    }
    const double trial_cost = cost_of(trial);
    if (trial_cost < cost) {
      theta = trial;
      cost = trial_cost;
      jac = jacobian(data, theta);
      r = residuals(data, theta);
      lambda = std::max(lambda * 0.3, 1e-15);
    } else {
      lambda *= 10.0;
      if (lambda > 1e20) break;
    }
  }

  fit.A0 = theta(0);
  fit.p = theta(1);
  fit.B0 = theta(2);
  fit.gradient_norm = projected_gradient_norm(jac, r, theta);
  double sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = data.y(k) - fit.model(data.j(k));
    sq += e * e;
  }
  fit.residual_rms = std::sqrt(sq / static_cast<double>(n));
  const double dof = static_cast<double>(n) - 3.0;
  const Eigen::Matrix3d normal = jac.transpose() * jac;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
  if (lu.isInvertible()) fit.covariance = (2.0 * cost / dof) * lu.inverse();
  return fit;
}

std::vector<double> inverse_variance_weights(std::span<const double> means, std::span<const double> shots) {
  if (means.size() != shots.size()) throw DimensionMismatch("inverse_variance_weights: size mismatch");
  std::vector<double> w(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (!(shots[i] > 0.0)) throw InvalidArgument("inverse_variance_weights: shot counts must be positive");
    const double half = 0.5 / shots[i];
    const double f = std::clamp(means[i], half, 1.0 - half);
    w[i] = shots[i] / (f * (1.0 - f));
  }
  return w;
}

double error_rate_from_p(double p, std::uint32_t d, std::uint32_t n) {
  const double dim = std::pow(static_cast<double>(d), static_cast<double>(n));
  return (1.0 - p) * (1.0 - 1.0 / dim);
}

double p_from_error_rate(double r, std::uint32_t d, std::uint32_t n) {
  const double dim = std::pow(static_cast<double>(d), static_cast<double>(n));
  return 1.0 - r / (1.0 - 1.0 / dim);
}

double average_fidelity_from_p(double p, std::uint32_t d, std::uint32_t n) {
  const double dim = std::pow(static_cast<double>(d), static_cast<double>(n));
  return p + (1.0 - p) / dim;
}

nlohmann::ordered_json fit_to_json(const DecayFit& fit) {
  nlohmann::ordered_json cov = nlohmann::ordered_json::array();
  for (int i = 0; i < 3; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int k = 0; k < 3; ++k) row.push_back(fit.covariance(i, k));
    cov.push_back(std::move(row));
  }
  nlohmann::ordered_json j;
  j["A0"] = fit.A0;
  j["p"] = fit.p;
  j["B0"] = fit.B0;
  j["residual_rms"] = fit.residual_rms;
  j["covariance"] = std::move(cov);
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["gradient_norm"] = fit.gradient_norm;
  return j;
}

}  // namespace qrb
