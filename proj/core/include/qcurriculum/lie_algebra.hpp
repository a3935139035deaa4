// Copyright 2026 The qcurriculum Authors
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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qcurriculum/pauli.hpp"
#include "qcurriculum/state_vector.hpp"

namespace qcurriculum {

/// Orthonormal basis of a dynamical Lie algebra in the Pauli-coefficient
/// representation. Elements are Hermitian with real coefficients and satisfy
/// Tr(B_j B_k) = delta_jk under the plain matrix trace, i.e. the squared
/// coefficients of each element sum to 2^-n.
struct LieBasis {
  std::size_t n = 0;
  std::vector<OperatorSum> elements;
  /// Hash of the generator set as given (order and coefficients included).
  std::string generator_fingerprint;

  std::size_t dim() const { return elements.size(); }
};

struct LieClosureOptions {
  std::size_t cap = 4096;
  double tolerance = 1e-10;
};

/// Lie closure <i G>_Lie by repeated commutation with the generators and
/// modified Gram-Schmidt on Pauli coefficients. Throws NumericalError if the
/// dimension exceeds options.cap, std::invalid_argument for empty, zero,
/// non-Hermitian or mismatched generators.
LieBasis lie_closure(std::span<const OperatorSum> generators, const LieClosureOptions& options = {});

/// {Z_i} and {X_i X_{i+1}} on an open chain of n qubits.
std::vector<OperatorSum> matchgate_generators(std::size_t n);

std::string fingerprint(std::span<const OperatorSum> generators);

/// Tr(A B) for Hermitian operators with real coefficients.
double trace_product(const OperatorSum& a, const OperatorSum& b);

/// Max |Tr(B_j B_k) - delta_jk|.
double orthonormality_residual(const LieBasis& basis);

/// Norm of the component of `op` orthogonal to span(basis), in the plain
/// Hilbert-Schmidt norm.
double span_residual(const OperatorSum& op, const LieBasis& basis);

/// sum_j Tr(B_j A)^2.
double g_purity(const OperatorSum& op, const LieBasis& basis);
/// sum_j <psi|B_j|psi>^2.
double g_purity(const StateVector& psi, const LieBasis& basis);

/// P_g(rho) P_g(O) / dim(g).
double variance_estimate(const StateVector& rho, const OperatorSum& observable,
                         const LieBasis& basis);

/// 1 - P_g(psi), clamped to [0, 1] against rounding.
double pg_score(const StateVector& psi, const LieBasis& basis);

/// Structured-text export of a basis. The document records both the
/// generator fingerprint and a hash of the element data.
std::string basis_to_json(const LieBasis& basis);
/// Throws IoError on malformed input, a content-hash mismatch, or when
/// `expected_fingerprint` is non-empty and differs from the stored one.
LieBasis basis_from_json(const std::string& text, const std::string& expected_fingerprint = {});

void save_basis(const std::string& path, const LieBasis& basis);
LieBasis load_basis(const std::string& path, const std::string& expected_fingerprint = {});

}  // namespace qcurriculum
