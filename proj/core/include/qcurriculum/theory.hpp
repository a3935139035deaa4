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
#include <string>
#include <vector>

#include "qcurriculum/qcnn.hpp"
#include "qcurriculum/spin_models.hpp"

namespace qcurriculum {

/// Binned estimate of G(z) = E[|grad l|^2 | s = z] over random
/// initializations, with the empirical score CDF.
struct GradientProfile {
  /// bins + 1 edges spanning the observed score range.
  std::vector<double> bin_edges;
  /// Mean squared gradient norm per bin; 0 for empty bins.
  std::vector<double> bin_mean;
  /// (example, parameter sample) draws per bin.
  std::vector<std::size_t> bin_count;
  std::vector<std::size_t> bin_examples;
  std::vector<bool> low_confidence;
  /// F at each bin's right edge; the last entry is 1.
  std::vector<double> cdf;
  std::vector<double> scores;
  /// Per-example mean of |grad l|^2 over the parameter samples.
  std::vector<double> example_mean;
  std::size_t param_samples = 0;
  std::size_t min_samples = 0;

  std::size_t bins() const { return bin_mean.size(); }
  /// True when G does not increase from one non-empty bin to the next.
  bool non_increasing() const;
};

struct EstimateOptions {
  std::size_t param_samples = 100;
  std::size_t bins = 10;
  std::size_t min_samples = 20;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

/// Throws std::invalid_argument for fewer than 30 parameter samples,
/// mismatched score/example counts, or an empty dataset.
GradientProfile estimate_G(const QcnnArchitecture& arch, std::span<const LabeledExample> examples,
                           std::span<const double> scores, std::size_t classes,
                           const EstimateOptions& options = {});

/// Builds a profile from per-example values directly (no circuit).
GradientProfile profile_from_values(std::span<const double> scores,
                                    std::span<const double> example_mean, std::size_t bins,
                                    std::size_t draws_per_example = 1,
                                    std::size_t min_samples = 20);

struct Prop1Row {
  double fraction = 0.0;
  double subset_mean = 0.0;
  double full_mean = 0.0;
  double ratio = 0.0;
  /// subset_mean >= full_mean, up to a 1e-12 relative rounding slack.
  bool holds = false;
};

struct Prop1Report {
  bool hypothesis_non_increasing = false;
  bool conclusion_all_fractions = false;
  std::vector<std::size_t> empty_bins;
  std::vector<Prop1Row> rows;
};

/// Subset mean over the lowest-score fraction of the binned distribution
/// (the boundary bin contributes part of its mass) against the full mean.
/// Both come from the same weighted-mean routine, so fraction 1 gives a
/// ratio of exactly 1.
Prop1Report prop1_check(const GradientProfile& profile, std::span<const double> fractions);

/// Mean over the subset of |grad l_i - mean grad|^2.
double gradient_variance(std::span<const std::vector<double>> per_example_gradients);
double gradient_variance(const QcnnArchitecture& arch, std::span<const double> theta,
                         const Batch& subset, std::size_t classes);

struct Prop2Options {
  std::size_t seeds = 50;
  std::size_t epochs = 50;
  std::size_t steps_per_epoch = 5;
  std::size_t minibatch = 10;
  std::uint64_t seed = 0;
};

struct Prop2Report {
  std::string surrogate;  // description of the convex toy
  std::size_t seeds = 0;
  std::size_t epochs = 0;
  std::size_t examples = 0;
  std::size_t features = 0;
  double learning_rate = 0.0;
  /// Per-seed final empirical risks.
  std::vector<double> risk_curriculum;
  std::vector<double> risk_random;
  double mean_risk_curriculum = 0.0;
  double mean_risk_random = 0.0;
  /// Standard error of the paired per-seed difference (0 for one seed).
  double sem_difference = 0.0;
  /// Seed-mean per-epoch gradient variances: the mean over the admitted
  /// examples of |grad l_i - grad R|^2, with R the full-set risk. The
  /// curriculum trace is conditioned on the current parameters; the
  /// "_initial" trace ranks and measures with the seed's initial
  /// parameters instead.
  std::vector<double> sigma2_curriculum;
  std::vector<double> sigma2_curriculum_initial;
  std::vector<double> sigma2_random;
  /// Seed-mean per-epoch full-set risks.
  std::vector<double> risk_trace_curriculum;
  std::vector<double> risk_trace_random;
  /// Epochs (1-based) where the curriculum sigma2 exceeds the random one
  /// by more than rounding (1e-12).
  std::vector<std::size_t> premise_failures;
  bool premise_holds = false;
  /// mean_risk_curriculum <= mean_risk_random + sem_difference.
  bool ordering_holds = false;
};

/// Low-variance ordering check on a convex surrogate: a linear readout with
/// squared loss over features <Z_i>, <X_i X_{i+1}> (plus a bias) measured
/// after a frozen random circuit, fitted to teacher targets by SGD.
/// Strategy A admits the lowest per-example gradient-variance examples
/// first under linear pacing; strategy B samples the full set uniformly.
Prop2Report prop2_toy_check(std::span<const LabeledExample> examples,
                            const Prop2Options& options = {});

/// Same comparison on explicit feature vectors and targets.
Prop2Report prop2_toy_check(const std::vector<std::vector<double>>& features,
                            std::span<const double> targets, const Prop2Options& options);

/// Frozen-circuit features used by the surrogate.
std::vector<std::vector<double>> surrogate_features(std::span<const LabeledExample> examples,
                                                    std::uint64_t seed);

}  // namespace qcurriculum
