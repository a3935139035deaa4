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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcurriculum/pauli.hpp"
#include "qcurriculum/spin_models.hpp"
#include "qcurriculum/state_vector.hpp"

namespace qcurriculum {

enum class QcnnVariant { Full, Matchgate };

std::string_view to_string(QcnnVariant variant);
QcnnVariant parse_qcnn_variant(std::string_view name);

/// U(theta) = exp(-i * scale * theta[param] * G) with G = Proj_1(controls) (x) P.
/// Identity at theta = 0.
struct Gate {
  PauliTerm generator;  // bare Pauli string on the target qubits
  std::uint64_t control_mask = 0;
  std::size_t param = 0;
  double scale = 0.5;
};

enum class LayerKind { Conv, Pool };

struct Layer {
  LayerKind kind = LayerKind::Conv;
  std::size_t param_offset = 0;
  std::size_t param_count = 0;
  std::vector<std::size_t> qubits_in;
  std::vector<std::size_t> qubits_out;
  /// Conv: coupled pairs. Pool: (measured, kept) pairs.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

/// 8 -> 4 -> 2 quantum convolutional network. Pooling is realized by
/// deferred measurement: measured qubits only act as controls afterwards and
/// are traced out when the output distribution is read.
struct QcnnArchitecture {
  QcnnVariant variant = QcnnVariant::Full;
  std::size_t n_in = 8;
  std::size_t n_out = 2;
  std::vector<Layer> layers;
  std::vector<Gate> gates;
  std::vector<std::size_t> output_qubits;
  std::size_t total_params = 0;

  std::vector<std::size_t> register_sizes() const;
  std::size_t num_outcomes() const { return std::size_t{1} << n_out; }
};

/// Parameter count of the Full variant; a build constant checked by tests.
inline constexpr std::size_t kFullQcnnParams = 51;
/// Parameter count of the Matchgate variant.
inline constexpr std::size_t kMatchgateQcnnParams = 12;

QcnnArchitecture build_qcnn(QcnnVariant variant);

struct QcnnParams {
  std::vector<double> theta;
};

/// Independent uniform draws on [-pi, pi).
QcnnParams random_params(const QcnnArchitecture& arch, std::uint64_t seed);

/// Output-register distribution (p00, p01, p10, p11), first output qubit
/// most significant.
struct Prediction {
  std::vector<double> probs;
};

using Batch = std::vector<const LabeledExample*>;
Batch batch_of(std::span<const LabeledExample> examples);
Batch batch_of(std::span<const LabeledExample> examples, std::span<const std::size_t> indices);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

/// The circuit at fixed parameters with runs of consecutive gates that
/// share a qubit pair multiplied into 4x4 blocks. Construct once per
/// parameter vector and reuse across examples.
class FusedCircuit {
 public:
  FusedCircuit(const QcnnArchitecture& arch, std::span<const double> theta);

  std::vector<Complex> evolve(const StateVector& psi) const;
  Prediction forward(const StateVector& psi) const;
  /// Adjoint-mode gradient of one example's loss. Within a block the gate
  /// terms are evaluated on the block's 4x4 reduced operator.
  LossGradient gradient(const LabeledExample& example, std::size_t classes) const;

  std::size_t num_blocks() const { return blocks_.size(); }

 private:
  using Mat4 = std::array<Complex, 16>;  // row-major
  struct LocalGate {
    std::size_t param = 0;
    double scale = 0.0;
    Mat4 u{};  // exp(-i scale theta G)
    Mat4 g{};  // G = Proj_1(controls) (x) P
  };
  struct Block {
    std::uint64_t hi_bit = 0;  // local index bit 1
    std::uint64_t lo_bit = 0;  // local index bit 0
    Mat4 u{};
    std::vector<LocalGate> gates;
  };

  void apply(const Mat4& u, const Block& block, std::vector<Complex>& amps) const;

  std::size_t n_ = 0;
  std::size_t total_params_ = 0;
  std::size_t outcomes_ = 0;
  std::vector<std::size_t> outputs_;
  std::vector<Block> blocks_;
};

/// Full register state after every gate (before marginalization).
std::vector<Complex> evolve(const QcnnArchitecture& arch, std::span<const double> theta,
                            const StateVector& psi);

Prediction forward(const QcnnArchitecture& arch, std::span<const double> theta,
                   const StateVector& psi);

/// sum_{j < M} (probs_j - y_j)^2.
double loss_from_probs(std::span<const double> probs, std::span<const double> label,
                       std::size_t classes);
double loss(const QcnnArchitecture& arch, std::span<const double> theta,
            const LabeledExample& example, std::size_t classes);

/// Mean loss over the batch.
double risk(const QcnnArchitecture& arch, std::span<const double> theta, const Batch& batch,
            std::size_t classes);

/// Adjoint-mode gradient of one example's loss.
LossGradient example_gradient(const QcnnArchitecture& arch, std::span<const double> theta,
                              const LabeledExample& example, std::size_t classes);

/// The same gradient from a gate-by-gate adjoint pass without fusion.
/// Slower; kept as an independent cross-check.
LossGradient example_gradient_gatewise(const QcnnArchitecture& arch, std::span<const double> theta,
                                       const LabeledExample& example, std::size_t classes);

/// Gradient of risk(), reduced over the batch in index order.
std::vector<double> gradient(const QcnnArchitecture& arch, std::span<const double> theta,
                             const Batch& batch, std::size_t classes);

/// argmax over the first `classes` outcomes; ties go to the lowest index.
int predict_class(std::span<const double> probs, std::size_t classes);

double accuracy(const QcnnArchitecture& arch, std::span<const double> theta, const Batch& batch,
                std::size_t classes);

}  // namespace qcurriculum
