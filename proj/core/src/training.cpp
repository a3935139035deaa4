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

#include "qcurriculum/training.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qcurriculum/errors.hpp"
#include "qcurriculum/file_io.hpp"
#include "qcurriculum/random.hpp"

namespace qcurriculum {

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974ULL;         // "init"
constexpr std::uint64_t kBatchStream = 0x6261746368ULL;      // "batch"
constexpr std::uint64_t kRandomScoreStream = 0x72616e64ULL;  // "rand"
constexpr std::uint64_t kReferenceStream = 0x726566ULL;      // "ref"

constexpr std::string_view kCheckpointFormat = "qcurriculum-checkpoint";

struct Evaluation {
  double accuracy = 0.0;
  double risk = 0.0;
};

Evaluation evaluate(const QcnnArchitecture& arch, std::span<const double> theta,
                    const Dataset& data, std::size_t classes) {
  Evaluation out;
  const FusedCircuit circuit(arch, theta);
  std::size_t correct = 0;
  for (const auto& e : data.examples) {
    const auto probs = circuit.forward(e.state).probs;
    out.risk += loss_from_probs(probs, e.label, classes);
    if (predict_class(probs, classes) == e.phase_index) ++correct;
  }
  const auto n = static_cast<double>(data.size());
  out.risk /= n;
  out.accuracy = static_cast<double>(correct) / n;
  return out;
}

void check_finite(std::span<const double> values, std::string_view what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericalError(fmt::format("non-finite {} at index {}", what, i));
    }
  }
}

nlohmann::json epoch_to_json(const EpochMetrics& e) {
  return {{"epoch", e.epoch},
          {"train_accuracy", e.train_accuracy},
          {"test_accuracy", e.test_accuracy},
          {"train_risk", e.train_risk},
          {"test_risk", e.test_risk},
          {"minibatch_risk", e.minibatch_risk},
          {"available", e.available},
          {"minibatches", e.minibatches}};
}

EpochMetrics epoch_from_json(const nlohmann::json& j) {
  EpochMetrics e;
  e.epoch = j.at("epoch").get<std::size_t>();
  e.train_accuracy = j.at("train_accuracy").get<double>();
  e.test_accuracy = j.at("test_accuracy").get<double>();
  e.train_risk = j.at("train_risk").get<double>();
  e.test_risk = j.at("test_risk").get<double>();
  e.minibatch_risk = j.at("minibatch_risk").get<double>();
  e.available = j.at("available").get<std::size_t>();
  e.minibatches = j.at("minibatches").get<std::vector<std::vector<std::size_t>>>();
  return e;
}

std::string config_key(const TrainConfig& c, std::size_t n_train) {
  return fmt::format("{}|{}|{}|{}|{}|{}|{}|{:.17g}|{:.17g}|{:.17g}|{:.17g}|{}|{}",
                     to_string(c.variant), to_string(c.strategy), to_string(c.loss_scorer),
                     c.epochs, c.steps_per_epoch, c.minibatch, n_train, c.adam.learning_rate,
                     c.adam.beta1, c.adam.beta2, c.adam.epsilon, c.run_seed,
                     c.pacing ? to_string(c.pacing->kind) : "preset");
}

struct RunState {
  std::size_t next_epoch = 1;
  std::vector<double> theta;
  AdamState adam;
  std::string rng_state;
  RunMetrics metrics;
};

void save_checkpoint(const std::string& path, const std::string& key, const RunState& s) {
  nlohmann::json doc;
  doc["format"] = kCheckpointFormat;
  doc["version"] = 1;
  doc["config"] = key;
  doc["next_epoch"] = s.next_epoch;
  doc["theta"] = s.theta;
  doc["adam_m"] = s.adam.m;
  doc["adam_v"] = s.adam.v;
  doc["adam_step"] = s.adam.step;
  doc["rng"] = s.rng_state;
  doc["initial_params"] = s.metrics.initial_params;
  doc["best_train_params"] = s.metrics.best_train_params;
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : s.metrics.epochs) epochs.push_back(epoch_to_json(e));
  doc["epochs"] = std::move(epochs);
  write_file_atomic(path, doc.dump());
}

RunState load_checkpoint(const std::string& path, const std::string& key) {
  RunState s;
  try {
    const auto doc = nlohmann::json::parse(read_file(path));
    if (doc.at("format").get<std::string>() != kCheckpointFormat) {
      throw IoError("not a checkpoint file: " + path);
    }
    if (doc.at("config").get<std::string>() != key) {
      throw IoError("checkpoint " + path + " was written by a different configuration");
    }
    s.next_epoch = doc.at("next_epoch").get<std::size_t>();
    s.theta = doc.at("theta").get<std::vector<double>>();
    s.adam.m = doc.at("adam_m").get<std::vector<double>>();
    s.adam.v = doc.at("adam_v").get<std::vector<double>>();
    s.adam.step = doc.at("adam_step").get<std::size_t>();
    s.rng_state = doc.at("rng").get<std::string>();
    s.metrics.initial_params = doc.at("initial_params").get<std::vector<double>>();
    s.metrics.best_train_params = doc.at("best_train_params").get<std::vector<double>>();
    for (const auto& e : doc.at("epochs")) s.metrics.epochs.push_back(epoch_from_json(e));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed checkpoint " + path + ": " + e.what());
  }
  return s;
}

/// `first` marks the first recorded epoch. An empty `theta` keeps the
/// stored best-train parameters (checkpoint replay).
void update_best(RunMetrics& m, const EpochMetrics& e, std::span<const double> theta, bool first) {
  if (first || e.train_accuracy > m.best_train_accuracy) {
    m.best_train_accuracy = e.train_accuracy;
    m.best_train_epoch = e.epoch;
    if (!theta.empty()) m.best_train_params.assign(theta.begin(), theta.end());
  }
  if (first || e.test_accuracy > m.best_test_accuracy) {
    m.best_test_accuracy = e.test_accuracy;
    m.best_test_epoch = e.epoch;
  }
}

void mean_sem(std::span<const double> xs, double& mean, double& sem) {
  const auto r = static_cast<double>(xs.size());
  // Shifted by the first value so identical runs give an exact mean and sem 0.
  double shift = 0.0;
  for (const double x : xs) shift += x - xs.front();
  mean = xs.front() + shift / r;
  sem = 0.0;
  if (xs.size() < 2) return;
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  sem = std::sqrt(ss / (r - 1.0)) / std::sqrt(r);
}

}  // namespace

const char* const kMetricsCsvHeader =
    "epoch,train_accuracy,test_accuracy,train_risk,test_risk,minibatch_risk,available,"
    "minibatches,config_hash";

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               const AdamConfig& config) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument(fmt::format("ADAM length mismatch: params {}, grads {}, state {}",
                                            params.size(), grads.size(), state.m.size()));
  }
  check_finite(grads, "gradient entry");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    state.m[k] = config.beta1 * state.m[k] + (1.0 - config.beta1) * grads[k];
    state.v[k] = config.beta2 * state.v[k] + (1.0 - config.beta2) * grads[k] * grads[k];
    const double m_hat = state.m[k] / c1;
    const double v_hat = state.v[k] / c2;
    params[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (steps_per_epoch < 1) throw ConfigError("steps_per_epoch must be at least 1");
  if (minibatch < 1) throw ConfigError("minibatch must be at least 1");
  if (!(adam.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw ConfigError("ADAM betas must lie in [0, 1)");
  }
  if (!(adam.epsilon > 0.0)) throw ConfigError("ADAM epsilon must be positive");
  if (pacing) pacing->validate();
}

std::uint64_t reference_seed(std::uint64_t run_seed) {
  return derive_seed(run_seed, kReferenceStream);
}

Strategy resolve_strategy(const TrainConfig& config, std::size_t dataset_size) {
  PresetOptions options;
  options.dataset_size = dataset_size;
  options.minibatch = config.minibatch;
  options.epochs = config.epochs;
  options.loss_scorer = config.loss_scorer;
  options.random_seed = derive_seed(config.run_seed, kRandomScoreStream);
  Strategy s = preset(config.strategy, options);
  if (config.pacing && config.strategy != StrategyName::Standard &&
      config.strategy != StrategyName::Hardest) {
    s.pacing = *config.pacing;
  }
  return s;
}

RunMetrics train_run(const TrainConfig& config, const TrainInputs& inputs,
                     const CheckpointOptions& checkpoint) {
  config.validate();
  if (inputs.train == nullptr || inputs.train->size() == 0) {
    throw std::invalid_argument("training needs a nonempty train set");
  }
  const Dataset& train = *inputs.train;
  const std::size_t classes = train.model.num_classes();
  const auto arch = build_qcnn(config.variant);
  const Strategy strategy = resolve_strategy(config, train.size());
  const std::string key = config_key(config, train.size());

  RunState state;
  Rng rng(derive_seed(config.run_seed, kBatchStream));
  if (checkpoint.resume && !checkpoint.path.empty() && std::filesystem::exists(checkpoint.path)) {
    state = load_checkpoint(checkpoint.path, key);
    rng.restore(state.rng_state);
    for (std::size_t i = 0; i < state.metrics.epochs.size(); ++i) {
      update_best(state.metrics, state.metrics.epochs[i], {}, i == 0);
    }
  } else {
    state.theta = random_params(arch, derive_seed(config.run_seed, kInitStream)).theta;
    state.adam = AdamState::zeros(arch.total_params);
    state.metrics.initial_params = state.theta;
  }

  ScoreContext context;
  context.arch = &arch;
  context.classes = classes;
  context.basis = inputs.basis;
  context.reference_params = inputs.reference_params;

  std::vector<double> scores;
  for (std::size_t t = state.next_epoch; t <= config.epochs; ++t) {
    if (scores.empty() || strategy.scorer.dynamic()) {
      context.current_params = state.theta;
      scores = score_all(strategy.scorer, train.examples, context);
    }
    const double fraction = pace(strategy.pacing, t, config.epochs);
    const auto available = select_available(scores, strategy.ordering, fraction, config.minibatch);

    EpochMetrics epoch;
    epoch.epoch = t;
    epoch.available = available.size();
    for (std::size_t k = 0; k < config.steps_per_epoch; ++k) {
      auto indices = draw_minibatch(available, config.minibatch, rng);
      const Batch batch = batch_of(train.examples, indices);
      const FusedCircuit circuit(arch, state.theta);
      std::vector<double> grad(arch.total_params, 0.0);
      double batch_risk = 0.0;
      for (const auto* e : batch) {
        const auto lg = circuit.gradient(*e, classes);
        batch_risk += lg.loss;
        for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += lg.gradient[p];
      }
      const double inv = 1.0 / static_cast<double>(batch.size());
      for (auto& g : grad) g *= inv;
      epoch.minibatch_risk += batch_risk * inv;
      adam_step(state.adam, state.theta, grad, config.adam);
      check_finite(state.theta, "parameter");
      epoch.minibatches.push_back(std::move(indices));
    }
    epoch.minibatch_risk /= static_cast<double>(config.steps_per_epoch);

    const auto on_train = evaluate(arch, state.theta, train, classes);
    if (!std::isfinite(on_train.risk)) {
      throw NumericalError(fmt::format("non-finite train risk at epoch {}", t));
    }
    epoch.train_accuracy = on_train.accuracy;
    epoch.train_risk = on_train.risk;
    if (inputs.test != nullptr && inputs.test->size() > 0) {
      const auto on_test = evaluate(arch, state.theta, *inputs.test, classes);
      epoch.test_accuracy = on_test.accuracy;
      epoch.test_risk = on_test.risk;
    }
    state.metrics.epochs.push_back(std::move(epoch));
    update_best(state.metrics, state.metrics.epochs.back(), state.theta,
                state.metrics.epochs.size() == 1);

    if (!checkpoint.path.empty()) {
      state.next_epoch = t + 1;
      state.rng_state = rng.state();
      save_checkpoint(checkpoint.path, key, state);
    }
    if (checkpoint.stop_after != 0 && t >= checkpoint.stop_after) break;
  }
  state.metrics.final_params = state.theta;
  return state.metrics;
}

std::vector<double> train_reference(const TrainConfig& config, const Dataset& train) {
  TrainConfig ref = config;
  ref.strategy = StrategyName::Standard;
  ref.pacing.reset();
  ref.run_seed = reference_seed(config.run_seed);
  TrainInputs inputs;
  inputs.train = &train;
  const auto metrics = train_run(ref, inputs);
  return config.reference_best_epoch ? metrics.best_train_params : metrics.final_params;
}

Aggregate aggregate(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate of zero runs");
  const std::size_t epochs = runs.front().epochs.size();
  for (const auto& r : runs) {
    if (r.epochs.size() != epochs) {
      throw std::invalid_argument("runs disagree on the number of epochs");
    }
  }
  Aggregate out;
  auto& c = out.curve;
  c.mean_test_accuracy.resize(epochs);
  c.sem_test_accuracy.resize(epochs);
  c.mean_train_accuracy.resize(epochs);
  c.sem_train_accuracy.resize(epochs);
  std::vector<double> xs(runs.size());
  for (std::size_t t = 0; t < epochs; ++t) {
    for (std::size_t r = 0; r < runs.size(); ++r) xs[r] = runs[r].epochs[t].test_accuracy;
    mean_sem(xs, c.mean_test_accuracy[t], c.sem_test_accuracy[t]);
    for (std::size_t r = 0; r < runs.size(); ++r) xs[r] = runs[r].epochs[t].train_accuracy;
    mean_sem(xs, c.mean_train_accuracy[t], c.sem_train_accuracy[t]);
  }
  for (std::size_t r = 0; r < runs.size(); ++r) xs[r] = runs[r].best_test_accuracy;
  mean_sem(xs, out.row.mean_best_test, out.row.sem_best_test);
  for (std::size_t r = 0; r < runs.size(); ++r) xs[r] = runs[r].best_train_accuracy;
  mean_sem(xs, out.row.mean_best_train, out.row.sem_best_train);
  out.row.runs = runs.size();
  return out;
}

std::string metrics_csv(const RunMetrics& run, const std::string& config_hash) {
  std::string out = kMetricsCsvHeader;
  out += '\n';
  for (const auto& e : run.epochs) {
    std::string batches;
    for (std::size_t k = 0; k < e.minibatches.size(); ++k) {
      if (k > 0) batches += '|';
      batches += fmt::format("{}", fmt::join(e.minibatches[k], " "));
    }
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{}\n", e.epoch,
                       e.train_accuracy, e.test_accuracy, e.train_risk, e.test_risk,
                       e.minibatch_risk, e.available, batches, config_hash);
  }
  return out;
}

}  // namespace qcurriculum
