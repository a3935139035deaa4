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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcurriculum/curriculum.hpp"
#include "qcurriculum/lie_algebra.hpp"
#include "qcurriculum/qcnn.hpp"
#include "qcurriculum/spin_models.hpp"

namespace qcurriculum {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;

  static AdamState zeros(std::size_t size) { return {std::vector<double>(size, 0.0),
                                                     std::vector<double>(size, 0.0), 0}; }
};

/// Bias-corrected ADAM update in place. Throws std::invalid_argument on
/// length mismatch and NumericalError on non-finite gradient entries.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               const AdamConfig& config);

struct TrainConfig {
  QcnnVariant variant = QcnnVariant::Full;
  StrategyName strategy = StrategyName::Standard;
  LossScorer loss_scorer = LossScorer::SelfPaced;
  /// Replaces the preset's pacing when set.
  std::optional<PacingFn> pacing;
  std::size_t epochs = 100;
  std::size_t steps_per_epoch = 5;
  std::size_t minibatch = 10;
  AdamConfig adam;
  std::uint64_t run_seed = 0;
  /// Self-taught reference: best-train-accuracy parameters instead of the
  /// final ones.
  bool reference_best_epoch = false;

  void validate() const;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double train_risk = 0.0;
  double test_risk = 0.0;
  /// Mean risk over the minibatches drawn this epoch, before each update.
  double minibatch_risk = 0.0;
  std::size_t available = 0;
  std::vector<std::vector<std::size_t>> minibatches;
};

struct RunMetrics {
  std::vector<EpochMetrics> epochs;
  double best_train_accuracy = 0.0;
  std::size_t best_train_epoch = 0;
  double best_test_accuracy = 0.0;
  std::size_t best_test_epoch = 0;
  std::vector<double> initial_params;
  std::vector<double> final_params;
  std::vector<double> best_train_params;
  /// Seed of the reference model behind self-taught scores, if any.
  std::optional<std::uint64_t> reference_seed;
};

/// Everything a run reads besides its config.
struct TrainInputs {
  const Dataset* train = nullptr;
  /// Optional; when absent test metrics are reported as zero.
  const Dataset* test = nullptr;
  const LieBasis* basis = nullptr;
  /// Parameters of the pre-trained reference model for self-taught scores.
  std::span<const double> reference_params;
};

struct CheckpointOptions {
  std::string path;  // empty: no checkpointing
  bool resume = false;
  /// Return after this epoch (0: run to T). For splitting a run across
  /// invocations.
  std::size_t stop_after = 0;
};

RunMetrics train_run(const TrainConfig& config, const TrainInputs& inputs,
                     const CheckpointOptions& checkpoint = {});

/// Seed used for the self-taught reference model of a run.
std::uint64_t reference_seed(std::uint64_t run_seed);

/// Trains the Standard-protocol reference model for self-taught scoring
/// and returns its final parameters.
std::vector<double> train_reference(const TrainConfig& config, const Dataset& train);

/// The strategy a config resolves to, including pacing overrides.
Strategy resolve_strategy(const TrainConfig& config, std::size_t dataset_size);

struct AggregateCurve {
  std::vector<double> mean_test_accuracy;
  std::vector<double> sem_test_accuracy;
  std::vector<double> mean_train_accuracy;
  std::vector<double> sem_train_accuracy;
};

struct AggregateRow {
  double mean_best_train = 0.0;
  double sem_best_train = 0.0;
  double mean_best_test = 0.0;
  double sem_best_test = 0.0;
  std::size_t runs = 0;
};

struct Aggregate {
  AggregateCurve curve;
  AggregateRow row;
};

/// Per-epoch means and standard errors (sample std / sqrt(R)); the row
/// averages each run's best accuracies. Throws std::invalid_argument when
/// the runs disagree on T or the list is empty.
Aggregate aggregate(std::span<const RunMetrics> runs);

/// Per-epoch CSV for one run. Columns are fixed by kMetricsCsvHeader.
std::string metrics_csv(const RunMetrics& run, const std::string& config_hash);
extern const char* const kMetricsCsvHeader;

}  // namespace qcurriculum
