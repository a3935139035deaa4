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
#include <cstdint>
#include <span>
#include <vector>

#include "qcurriculum/pauli.hpp"

namespace qcurriculum {

/// Normalization tolerance enforced by the checked constructor.
inline constexpr double kStateNormTolerance = 1e-10;

/// Pure state of an n-qubit register: 2^n amplitudes, qubit 0 is the most
/// significant bit of the amplitude index.
class StateVector {
 public:
  StateVector() = default;

  /// Throws std::invalid_argument unless amplitudes.size() == 2^n and the
  /// L2 norm is 1 within kStateNormTolerance.
  StateVector(std::size_t n, std::vector<Complex> amplitudes);

  static StateVector basis(std::size_t n, std::uint64_t index);
  /// Rescales to unit norm; throws on a zero vector.
  static StateVector normalized(std::size_t n, std::vector<Complex> amplitudes);
  /// Skips the norm check. For intermediate results such as c * P|psi>.
  static StateVector unchecked(std::size_t n, std::vector<Complex> amplitudes);

  std::size_t num_qubits() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

  double norm() const;
  Complex inner(const StateVector& other) const;  // <this|other>

 private:
  std::size_t n_ = 0;
  std::vector<Complex> amplitudes_;
};

/// In-place psi <- P psi for the bare string (coefficient ignored).
void apply_pauli_letters(const PauliTerm& term, std::span<Complex> amplitudes);

/// coefficient * (P |psi>).
StateVector pauli_apply(const PauliTerm& term, const StateVector& psi);

/// H |psi> without forming a matrix.
std::vector<Complex> apply_operator(const OperatorSum& op, std::span<const Complex> psi);

/// <psi| c P |psi> (complex in general).
Complex expectation(const PauliTerm& term, const StateVector& psi);

/// <psi|H|psi> for Hermitian H. Throws std::invalid_argument for
/// non-Hermitian input and NumericalError if the imaginary residue
/// exceeds 1e-10.
double expectation(const OperatorSum& hamiltonian, const StateVector& psi);

/// Computational-basis distribution of the listed qubits. The first listed
/// qubit is the most significant bit of the outcome index.
std::vector<double> marginal_probs(const StateVector& psi, std::span<const std::size_t> qubits);
std::vector<double> marginal_probs(std::span<const Complex> amplitudes, std::size_t n,
                                   std::span<const std::size_t> qubits);

}  // namespace qcurriculum
