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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qrb {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Dense operators share one representation; the aliases name the role.
using DenseUnitary = CMatrix;
using DensityMatrix = CMatrix;
using StateVector = CVector;

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed caller input: bad dimensions, out-of-range parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Operands whose (d, n) or matrix shapes disagree.
class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Valid request outside what the implementation supports (composite d, ...).
class Unsupported : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Group larger than the configured enumeration cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

// A broken internal invariant. Should never surface for valid input.
class InternalError : public Error {
 public:
  using Error::Error;
};

bool is_prime(std::uint32_t d);

// d^n, throwing if it overflows 32 bits.
std::uint32_t ipow(std::uint32_t base, std::uint32_t exp);

// Kronecker product of two dense matrices.
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Largest |a_ij - b_ij|.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

// Worker threads used by parallel loops. Defaults to the hardware
// concurrency, capped by the QRB_THREADS environment variable.
unsigned max_threads();
void set_max_threads(unsigned n);  // 0 restores the default

// Runs body(i) for i in [0, count). Iterations must be independent; the
// assignment of indices to threads is unspecified.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// SplitMix64 finalizer; used to derive independent RNG stream seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed for the stream identified by (seed, a, b).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace qrb
