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

#include <Eigen/Dense>

#include "qcurriculum/pauli.hpp"
#include "qcurriculum/state_vector.hpp"

namespace qcurriculum {

/// Register size above which dense matrices are refused.
inline constexpr std::size_t kDefaultDenseQubitCap = 12;

/// Spectral gap below which a ground space is treated as degenerate.
inline constexpr double kDegeneracyGap = 1e-8;

/// Sum_k c_k (P_k as a 2^n x 2^n Kronecker product), qubit 0 most significant.
Eigen::MatrixXcd dense_matrix(const OperatorSum& op, std::size_t qubit_cap = kDefaultDenseQubitCap);

struct GroundState {
  double energy = 0.0;
  /// E_1 - E_0.
  double gap = 0.0;
  bool degenerate = false;
  double residual = 0.0;
  StateVector state;
};

/// Lowest eigenpair from a full Hermitian eigendecomposition. The global
/// phase is fixed by making the first amplitude with magnitude > 1e-8 real
/// and positive. Throws NumericalError if the residual ||H psi - E psi||
/// reaches 1e-8.
GroundState ground_state(const OperatorSum& hamiltonian,
                         std::size_t qubit_cap = kDefaultDenseQubitCap);

}  // namespace qcurriculum
