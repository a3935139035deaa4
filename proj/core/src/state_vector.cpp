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

#include "qcurriculum/state_vector.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qcurriculum/errors.hpp"

namespace qcurriculum {

namespace {

void check_dimension(std::size_t n, std::size_t size) {
  if (n == 0 || n > 30 || size != (std::size_t{1} << n)) {
    throw std::invalid_argument("state of " + std::to_string(size) +
                                " amplitudes is not a " + std::to_string(n) + "-qubit register");
  }
}

double squared_norm(std::span<const Complex> amplitudes) {
  double total = 0.0;
  for (const auto& a : amplitudes) total += std::norm(a);
  return total;
}

}  // namespace

StateVector::StateVector(std::size_t n, std::vector<Complex> amplitudes)
    : n_(n), amplitudes_(std::move(amplitudes)) {
  check_dimension(n_, amplitudes_.size());
  if (std::abs(norm() - 1.0) > kStateNormTolerance) {
    throw std::invalid_argument("state vector is not normalized");
  }
}

StateVector StateVector::basis(std::size_t n, std::uint64_t index) {
  std::vector<Complex> amplitudes(std::size_t{1} << n);
  if (index >= amplitudes.size()) throw std::out_of_range("basis index out of range");
  amplitudes[index] = 1.0;
  return StateVector(n, std::move(amplitudes));
}

StateVector StateVector::normalized(std::size_t n, std::vector<Complex> amplitudes) {
  check_dimension(n, amplitudes.size());
  const double length = std::sqrt(squared_norm(amplitudes));
  if (!(length > 0.0)) throw std::invalid_argument("cannot normalize a zero vector");
  for (auto& a : amplitudes) a /= length;
  return StateVector(n, std::move(amplitudes));
}

StateVector StateVector::unchecked(std::size_t n, std::vector<Complex> amplitudes) {
  check_dimension(n, amplitudes.size());
  StateVector out;
  out.n_ = n;
  out.amplitudes_ = std::move(amplitudes);
  return out;
}

double StateVector::norm() const { return std::sqrt(squared_norm(amplitudes_)); }

Complex StateVector::inner(const StateVector& other) const {
  if (other.dimension() != dimension()) throw std::invalid_argument("dimension mismatch");
  Complex total{};
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    total += std::conj(amplitudes_[i]) * other.amplitudes_[i];
  }
  return total;
}

void apply_pauli_letters(const PauliTerm& term, std::span<Complex> amplitudes) {
  const std::uint64_t x = term.x_mask();
  if (x == 0) {
    for (std::uint64_t b = 0; b < amplitudes.size(); ++b) {
      amplitudes[b] *= term.letter_phase(b);
    }
    return;
  }
  for (std::uint64_t b = 0; b < amplitudes.size(); ++b) {
    const std::uint64_t partner = b ^ x;
    if (partner < b) continue;
    const Complex lo = amplitudes[b];
    const Complex hi = amplitudes[partner];
    amplitudes[partner] = term.letter_phase(b) * lo;
    amplitudes[b] = term.letter_phase(partner) * hi;
  }
}

StateVector pauli_apply(const PauliTerm& term, const StateVector& psi) {
  if (term.num_qubits() != psi.num_qubits()) {
    throw std::invalid_argument("Pauli term and state act on different qubit counts");
  }
  std::vector<Complex> out(psi.amplitudes().begin(), psi.amplitudes().end());
  apply_pauli_letters(term, out);
  for (auto& a : out) a *= term.coefficient();
  return StateVector::unchecked(psi.num_qubits(), std::move(out));
}

std::vector<Complex> apply_operator(const OperatorSum& op, std::span<const Complex> psi) {
  if (psi.size() != (std::size_t{1} << op.num_qubits())) {
    throw std::invalid_argument("operator and state dimensions differ");
  }
  std::vector<Complex> out(psi.size());
  for (const auto& term : op.terms()) {
    const std::uint64_t x = term.x_mask();
    const Complex c = term.coefficient();
    for (std::uint64_t b = 0; b < psi.size(); ++b) {
      out[b ^ x] += c * term.letter_phase(b) * psi[b];
    }
  }
  return out;
}

Complex expectation(const PauliTerm& term, const StateVector& psi) {
  if (term.num_qubits() != psi.num_qubits()) {
    throw std::invalid_argument("Pauli term and state act on different qubit counts");
  }
  const auto amps = psi.amplitudes();
  const std::uint64_t x = term.x_mask();
  Complex total{};
  for (std::uint64_t b = 0; b < amps.size(); ++b) {
    total += std::conj(amps[b ^ x]) * term.letter_phase(b) * amps[b];
  }
  return term.coefficient() * total;
}

double expectation(const OperatorSum& hamiltonian, const StateVector& psi) {
  if (hamiltonian.num_qubits() != psi.num_qubits()) {
    throw std::invalid_argument("operator and state act on different qubit counts");
  }
  if (!hamiltonian.hermitian()) {
    throw std::invalid_argument("expectation requires a Hermitian operator");
  }
  Complex total{};
  for (const auto& term : hamiltonian.terms()) total += expectation(term, psi);
  if (std::abs(total.imag()) > 1e-10) {
    throw NumericalError("expectation value has imaginary residue " +
                         std::to_string(total.imag()));
  }
  return total.real();
}

std::vector<double> marginal_probs(std::span<const Complex> amplitudes, std::size_t n,
                                   std::span<const std::size_t> qubits) {
  check_dimension(n, amplitudes.size());
  std::uint64_t seen = 0;
  for (const std::size_t q : qubits) {
    if (q >= n) throw std::invalid_argument("marginal qubit index out of range");
    const std::uint64_t bit = qubit_bit(n, q);
    if (seen & bit) throw std::invalid_argument("marginal qubit listed twice");
    seen |= bit;
  }
  if (qubits.empty()) throw std::invalid_argument("marginal over an empty qubit subset");
  const std::size_t k = qubits.size();
  std::vector<double> probs(std::size_t{1} << k, 0.0);
  for (std::uint64_t b = 0; b < amplitudes.size(); ++b) {
    std::size_t outcome = 0;
    for (std::size_t j = 0; j < k; ++j) {
      outcome = (outcome << 1) | ((b & qubit_bit(n, qubits[j])) ? 1U : 0U);
    }
    probs[outcome] += std::norm(amplitudes[b]);
  }
  return probs;
}

std::vector<double> marginal_probs(const StateVector& psi, std::span<const std::size_t> qubits) {
  return marginal_probs(psi.amplitudes(), psi.num_qubits(), qubits);
}

}  // namespace qcurriculum
