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

#include "qcurriculum/dense.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qcurriculum/errors.hpp"

namespace qcurriculum {

namespace {

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw std::invalid_argument("dense matrix of " + std::to_string(n) +
                                " qubits exceeds the cap of " + std::to_string(cap));
  }
}

bool real_matrix(const OperatorSum& op) {
  for (const auto& term : op.terms()) {
    // Y contributes a factor i, so a term is real iff c * i^{#Y} is real.
    const Complex c = term.coefficient() * std::pow(Complex{0, 1}, term.y_count());
    if (std::abs(c.imag()) > 0.0) return false;
  }
  return true;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> assemble(const OperatorSum& op) {
  const std::size_t dim = std::size_t{1} << op.num_qubits();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(dim, dim);
  for (const auto& term : op.terms()) {
    const std::uint64_t x = term.x_mask();
    for (std::uint64_t b = 0; b < dim; ++b) {
      const Complex value = term.coefficient() * term.letter_phase(b);
      if constexpr (std::is_same_v<Scalar, double>) {
        m(b ^ x, b) += value.real();
      } else {
        m(b ^ x, b) += value;
      }
    }
  }
  return m;
}

}  // namespace

Eigen::MatrixXcd dense_matrix(const OperatorSum& op, std::size_t qubit_cap) {
  check_cap(op.num_qubits(), qubit_cap);
  return assemble<Complex>(op);
}

GroundState ground_state(const OperatorSum& hamiltonian, std::size_t qubit_cap) {
  const std::size_t n = hamiltonian.num_qubits();
  check_cap(n, qubit_cap);
  if (!hamiltonian.hermitian()) {
    throw std::invalid_argument("ground_state requires a Hermitian operator");
  }
  const std::size_t dim = std::size_t{1} << n;

  Eigen::VectorXd eigenvalues;
  std::vector<Complex> amplitudes(dim);
  if (real_matrix(hamiltonian)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(assemble<double>(hamiltonian));
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
    eigenvalues = solver.eigenvalues();
    for (std::size_t i = 0; i < dim; ++i) amplitudes[i] = solver.eigenvectors()(i, 0);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(assemble<Complex>(hamiltonian));
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
    eigenvalues = solver.eigenvalues();
    for (std::size_t i = 0; i < dim; ++i) amplitudes[i] = solver.eigenvectors()(i, 0);
  }

  for (const auto& a : amplitudes) {
    if (std::abs(a) > 1e-8) {
      const Complex phase = std::conj(a) / std::abs(a);
      for (auto& b : amplitudes) b *= phase;
      break;
    }
  }

  GroundState out;
  out.energy = eigenvalues(0);
  out.gap = dim > 1 ? eigenvalues(1) - eigenvalues(0) : 0.0;
  out.degenerate = dim > 1 && out.gap < kDegeneracyGap;
  out.state = StateVector::normalized(n, std::move(amplitudes));

  const auto h_psi = apply_operator(hamiltonian, out.state.amplitudes());
  double residual2 = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    residual2 += std::norm(h_psi[i] - out.energy * out.state[i]);
  }
  out.residual = std::sqrt(residual2);
  if (!(out.residual < 1e-8)) {
    throw NumericalError("ground state residual " + std::to_string(out.residual) +
                         " exceeds 1e-8");
  }
  return out;
}

}  // namespace qcurriculum
