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

#include "qcurriculum/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "qcurriculum/errors.hpp"

namespace qcurriculum {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view name, const std::pair<std::string_view, Enum> (&table)[N],
                std::string_view what) {
  for (const auto& [key, value] : table) {
    if (key == name) return value;
  }
  throw ConfigError(fmt::format("unknown {} '{}'", what, name));
}

constexpr std::pair<std::string_view, PacingKind> kPacingNames[] = {
    {"linear", PacingKind::Linear},     {"root-p", PacingKind::RootP},
    {"geometric", PacingKind::Geometric}, {"constant", PacingKind::Constant},
    {"full", PacingKind::Full}};

constexpr std::pair<std::string_view, StrategyName> kStrategyNames[] = {
    {"standard", StrategyName::Standard}, {"random", StrategyName::Random},
    {"easy", StrategyName::Easy},         {"hard", StrategyName::Hard},
    {"hardest", StrategyName::Hardest},   {"higher-pg", StrategyName::HigherPg},
    {"lower-pg", StrategyName::LowerPg}};

constexpr std::pair<std::string_view, LossScorer> kLossScorerNames[] = {
    {"self-taught", LossScorer::SelfTaught}, {"self-paced", LossScorer::SelfPaced}};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum value, const std::pair<std::string_view, Enum> (&table)[N]) {
  for (const auto& [key, v] : table) {
    if (v == value) return key;
  }
  return "?";
}

std::vector<double> losses(const ScoreContext& context, std::span<const double> params,
                           std::span<const LabeledExample> examples, std::string_view who) {
  if (context.arch == nullptr || params.empty() || context.classes == 0) {
    throw ConfigError(fmt::format("{} scoring needs an architecture, parameters and a class count",
                                  who));
  }
  std::vector<double> raw(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    raw[i] = loss(*context.arch, params, examples[i], context.classes);
  }
  return raw;
}

}  // namespace

std::string_view to_string(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::Uniform: return "uniform";
    case ScorerKind::Random: return "random";
    case ScorerKind::SelfTaught: return "self-taught";
    case ScorerKind::SelfPaced: return "self-paced";
    case ScorerKind::PhysicsPg: return "physics-pg";
  }
  return "?";
}

std::string_view to_string(Ordering ordering) {
  return ordering == Ordering::Ascending ? "ascending" : "descending";
}

std::string_view to_string(PacingKind kind) { return name_of(kind, kPacingNames); }
std::string_view to_string(StrategyName name) { return name_of(name, kStrategyNames); }
std::string_view to_string(LossScorer scorer) { return name_of(scorer, kLossScorerNames); }

PacingKind parse_pacing_kind(std::string_view name) {
  return parse_enum(name, kPacingNames, "pacing function");
}
StrategyName parse_strategy(std::string_view name) {
  return parse_enum(name, kStrategyNames, "strategy");
}
LossScorer parse_loss_scorer(std::string_view name) {
  return parse_enum(name, kLossScorerNames, "loss scorer");
}

void PacingFn::validate() const {
  if (kind == PacingKind::Constant) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
      throw ConfigError(fmt::format("constant pacing fraction {} outside (0, 1]", fraction));
    }
    return;
  }
  if (kind == PacingKind::Full) return;
  if (!(start_fraction > 0.0 && start_fraction <= 1.0)) {
    throw ConfigError(fmt::format("pacing start fraction {} outside (0, 1]", start_fraction));
  }
  if (!(saturation_epoch > 0.0)) {
    throw ConfigError("pacing saturation epoch must be positive");
  }
}

std::vector<double> min_max_normalize(std::span<const double> raw) {
  std::vector<double> out(raw.size(), 0.0);
  if (raw.empty()) return out;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double low = *lo;
  const double range = *hi - low;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - low) / range;
  return out;
}

std::vector<double> score_all(const Scorer& scorer, std::span<const LabeledExample> examples,
                              const ScoreContext& context) {
  switch (scorer.kind) {
    case ScorerKind::Uniform:
      return std::vector<double>(examples.size(), 0.0);
    case ScorerKind::Random: {
      Rng rng(scorer.seed);
      std::vector<double> raw(examples.size());
      for (auto& r : raw) r = rng.uniform();
      return min_max_normalize(raw);
    }
    case ScorerKind::SelfTaught:
      return min_max_normalize(losses(context, context.reference_params, examples, "self-taught"));
    case ScorerKind::SelfPaced:
      return min_max_normalize(losses(context, context.current_params, examples, "self-paced"));
    case ScorerKind::PhysicsPg: {
      if (context.basis == nullptr) throw ConfigError("physics scoring needs a Lie basis");
      std::vector<double> raw(examples.size());
      for (std::size_t i = 0; i < examples.size(); ++i) {
        raw[i] = pg_score(examples[i].state, *context.basis);
      }
      return raw;
    }
  }
  throw std::logic_error("unhandled scorer kind");
}

double pace(const PacingFn& fn, std::size_t t, std::size_t total_epochs) {
  if (t < 1 || t > total_epochs) {
    throw std::out_of_range(fmt::format("epoch {} outside [1, {}]", t, total_epochs));
  }
  const double p0 = fn.start_fraction;
  const double progress = static_cast<double>(t) / fn.saturation_epoch;
  switch (fn.kind) {
    case PacingKind::Linear:
      return std::min(1.0, p0 + (1.0 - p0) * progress);
    case PacingKind::RootP:
      return std::min(1.0, std::sqrt(p0 * p0 + (1.0 - p0 * p0) * progress));
    case PacingKind::Geometric:
      return std::min(1.0, p0 * std::pow(1.0 / p0, progress));
    case PacingKind::Constant:
      return fn.fraction;
    case PacingKind::Full:
      return 1.0;
  }
  throw std::logic_error("unhandled pacing kind");
}

std::vector<std::size_t> select_available(std::span<const double> scores, Ordering ordering,
                                          double fraction, std::size_t minibatch) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument(fmt::format("availability fraction {} outside (0, 1]", fraction));
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (ordering == Ordering::Ascending) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  }
  // Guard the ceiling against fraction * N landing a hair above an integer.
  const double exact = fraction * static_cast<double>(n);
  const auto paced = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  const std::size_t keep = std::min(n, std::max(paced, std::min(minibatch, n)));
  order.resize(keep);
  return order;
}

std::vector<std::size_t> draw_minibatch(std::span<const std::size_t> available,
                                        std::size_t minibatch, Rng& rng) {
  if (available.empty()) throw std::invalid_argument("no examples available for a minibatch");
  std::vector<std::size_t> pool(available.begin(), available.end());
  const std::size_t take = std::min(minibatch, pool.size());
  for (std::size_t i = 0; i < take; ++i) {
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  }
  pool.resize(take);
  return pool;
}

PacingFn default_pacing(const PresetOptions& options) {
  PacingFn fn;
  fn.kind = PacingKind::Linear;
  fn.start_fraction = std::min(1.0, static_cast<double>(options.minibatch) /
                                        static_cast<double>(options.dataset_size));
  fn.saturation_epoch = 0.8 * static_cast<double>(options.epochs);
  return fn;
}

Strategy preset(StrategyName name, const PresetOptions& options) {
  if (options.dataset_size == 0 || options.minibatch == 0 || options.epochs == 0) {
    throw ConfigError("preset needs positive dataset size, minibatch and epoch count");
  }
  Strategy s;
  s.name = name;
  const ScorerKind loss_kind =
      options.loss_scorer == LossScorer::SelfTaught ? ScorerKind::SelfTaught : ScorerKind::SelfPaced;
  switch (name) {
    case StrategyName::Standard:
      s.scorer.kind = ScorerKind::Uniform;
      s.pacing.kind = PacingKind::Full;
      break;
    case StrategyName::Random:
      s.scorer.kind = ScorerKind::Random;
      s.scorer.seed = options.random_seed;
      s.pacing = default_pacing(options);
      break;
    case StrategyName::Easy:
    case StrategyName::Hard:
      s.scorer.kind = loss_kind;
      s.ordering = name == StrategyName::Easy ? Ordering::Ascending : Ordering::Descending;
      s.pacing = default_pacing(options);
      break;
    case StrategyName::Hardest:
      s.scorer.kind = ScorerKind::SelfPaced;
      s.ordering = Ordering::Descending;
      s.pacing.kind = PacingKind::Constant;
      s.pacing.fraction = std::min(1.0, static_cast<double>(options.minibatch) /
                                            static_cast<double>(options.dataset_size));
      break;
    case StrategyName::HigherPg:
    case StrategyName::LowerPg:
      // Score is 1 - P_g, so higher purity means a lower score.
      s.scorer.kind = ScorerKind::PhysicsPg;
      s.scorer.direction =
          name == StrategyName::HigherPg ? PgDirection::HigherFirst : PgDirection::LowerFirst;
      s.ordering = name == StrategyName::HigherPg ? Ordering::Ascending : Ordering::Descending;
      s.pacing = default_pacing(options);
      break;
  }
  return s;
}

}  // namespace qcurriculum
