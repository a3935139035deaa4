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
#include <string_view>
#include <vector>

#include "qcurriculum/lie_algebra.hpp"
#include "qcurriculum/qcnn.hpp"
#include "qcurriculum/random.hpp"
#include "qcurriculum/spin_models.hpp"

namespace qcurriculum {

enum class ScorerKind { Uniform, Random, SelfTaught, SelfPaced, PhysicsPg };
enum class PgDirection { HigherFirst, LowerFirst };
enum class Ordering { Ascending, Descending };
enum class PacingKind { Linear, RootP, Geometric, Constant, Full };
enum class StrategyName { Standard, Random, Easy, Hard, Hardest, HigherPg, LowerPg };
/// Which loss-based scorer Easy/Hard use.
enum class LossScorer { SelfTaught, SelfPaced };

std::string_view to_string(ScorerKind kind);
std::string_view to_string(Ordering ordering);
std::string_view to_string(PacingKind kind);
std::string_view to_string(StrategyName name);
std::string_view to_string(LossScorer scorer);
PacingKind parse_pacing_kind(std::string_view name);
StrategyName parse_strategy(std::string_view name);
LossScorer parse_loss_scorer(std::string_view name);

struct Scorer {
  ScorerKind kind = ScorerKind::Uniform;
  PgDirection direction = PgDirection::LowerFirst;  // PhysicsPg only
  std::uint64_t seed = 0;                           // Random only

  /// SelfPaced rescoring happens every epoch; every other kind scores once.
  bool dynamic() const { return kind == ScorerKind::SelfPaced; }
};

struct PacingFn {
  PacingKind kind = PacingKind::Full;
  double start_fraction = 1.0;    // p0, in (0, 1]
  double saturation_epoch = 1.0;  // T_sat, in epochs
  double fraction = 1.0;          // Constant only

  void validate() const;
};

struct Strategy {
  StrategyName name = StrategyName::Standard;
  Scorer scorer;
  Ordering ordering = Ordering::Ascending;
  PacingFn pacing;
};

/// Inputs a scorer may need. Loss-based kinds need `arch` and the matching
/// parameter vector; PhysicsPg needs `basis`.
struct ScoreContext {
  const QcnnArchitecture* arch = nullptr;
  std::span<const double> current_params;
  std::span<const double> reference_params;
  const LieBasis* basis = nullptr;
  std::size_t classes = 0;
};

/// Raw per-example difficulty. Loss-based and random values are min-max
/// normalized over the dataset (all zeros when max == min); PhysicsPg
/// emits 1 - P_g unchanged. Throws ConfigError when the context lacks what
/// the kind needs.
std::vector<double> score_all(const Scorer& scorer, std::span<const LabeledExample> examples,
                              const ScoreContext& context);

/// Min-max normalization to [0, 1]; constant input maps to zeros.
std::vector<double> min_max_normalize(std::span<const double> raw);

/// Fraction of the ordered dataset available at epoch t (1-based).
double pace(const PacingFn& fn, std::size_t t, std::size_t total_epochs);

/// Indices sorted by score (ties by index), truncated to
/// max(ceil(fraction * N), min(L, N)).
std::vector<std::size_t> select_available(std::span<const double> scores, Ordering ordering,
                                          double fraction, std::size_t minibatch);

/// min(L, |available|) distinct entries, uniformly without replacement.
std::vector<std::size_t> draw_minibatch(std::span<const std::size_t> available,
                                        std::size_t minibatch, Rng& rng);

struct PresetOptions {
  std::size_t dataset_size = 50;
  std::size_t minibatch = 10;
  std::size_t epochs = 100;
  LossScorer loss_scorer = LossScorer::SelfPaced;
  std::uint64_t random_seed = 0;
};

/// Linear from p0 = L/N, saturating at 0.8 T.
PacingFn default_pacing(const PresetOptions& options);

Strategy preset(StrategyName name, const PresetOptions& options = {});

}  // namespace qcurriculum
