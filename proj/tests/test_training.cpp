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


#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcurriculum/errors.hpp"
#include "qcurriculum/spin_models.hpp"
#include "qcurriculum/training.hpp"

namespace qc = qcurriculum;
using qc::StrategyName;

namespace {

class Training : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    train_ = new qc::Dataset(qc::generate_dataset(qc::ModelSpec::cluster(), 50, 1, qc::DatasetRole::Train));
    test_ = new qc::Dataset(qc::generate_dataset(qc::ModelSpec::cluster(), 40, 2, qc::DatasetRole::Test));
  }
  static void TearDownTestSuite() {
    delete train_;
    delete test_;
  }

  static qc::TrainConfig config(StrategyName strategy, std::size_t epochs, std::uint64_t seed = 0) {
    qc::TrainConfig c;
    c.strategy = strategy;
    c.epochs = epochs;
    c.run_seed = seed;
    return c;
  }
  static qc::TrainInputs inputs() { return {train_, test_, nullptr, {}}; }

  static qc::Dataset* train_;
  static qc::Dataset* test_;
};

qc::Dataset* Training::train_ = nullptr;
qc::Dataset* Training::test_ = nullptr;

qc::RunMetrics run_with_test_accuracy(std::vector<double> values, double best_train) {
  qc::RunMetrics r;
  for (std::size_t t = 0; t < values.size(); ++t) {
    qc::EpochMetrics e;
    e.epoch = t + 1;
    e.test_accuracy = values[t];
    e.train_accuracy = best_train;
    r.epochs.push_back(e);
  }
  r.best_test_accuracy = *std::max_element(values.begin(), values.end());
  r.best_train_accuracy = best_train;
  return r;
}

}  // namespace

TEST(Adam, FirstStepMatchesHandComputation) {
  qc::AdamConfig cfg;
  auto state = qc::AdamState::zeros(3);
  std::vector<double> params{0.5, -1.0, 2.0};
  const std::vector<double> g{0.2, -3.0, 1e-3};
  qc::adam_step(state, params, g, cfg);
  // Bias correction makes m_hat = g and v_hat = g^2 after one step.
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_DOUBLE_EQ(state.m[k], 0.1 * g[k]);
    EXPECT_NEAR(state.v[k], 0.001 * g[k] * g[k], 1e-12 * g[k] * g[k]);
    EXPECT_GE(state.v[k], 0.0);
  }
  EXPECT_NEAR(params[0], 0.5 - 0.01 * 0.2 / (0.2 + 1e-8), 1e-15);
  EXPECT_NEAR(params[1], -1.0 + 0.01 * 3.0 / (3.0 + 1e-8), 1e-15);
  EXPECT_NEAR(params[2], 2.0 - 0.01 * 1e-3 / (1e-3 + 1e-8), 1e-15);
  EXPECT_EQ(state.step, 1U);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  qc::AdamConfig cfg;
  auto state = qc::AdamState::zeros(2);
  std::vector<double> params{0.3, 0.7};
  qc::adam_step(state, params, std::vector<double>{1.0, -1.0}, cfg);
  const auto m_before = state.m;
  const auto moved = params;
  qc::adam_step(state, params, std::vector<double>{0.0, 0.0}, cfg);
  // The first moments decay but are nonzero, so only check they shrink.
  EXPECT_DOUBLE_EQ(state.m[0], 0.9 * m_before[0]);
  auto fresh = qc::AdamState::zeros(2);
  std::vector<double> still{0.3, 0.7};
  for (int i = 0; i < 10; ++i) qc::adam_step(fresh, still, std::vector<double>{0.0, 0.0}, cfg);
  EXPECT_EQ(still, (std::vector<double>{0.3, 0.7}));
  EXPECT_NE(moved, params);
}

TEST(Adam, ConstantGradientStepApproachesLearningRate) {
  qc::AdamConfig cfg;
  auto state = qc::AdamState::zeros(2);
  std::vector<double> params{0.0, 0.0};
  const std::vector<double> g{0.37, -12.0};
  for (int i = 0; i < 2000; ++i) qc::adam_step(state, params, g, cfg);
  const auto before = params;
  qc::adam_step(state, params, g, cfg);
  EXPECT_NEAR(params[0] - before[0], -cfg.learning_rate, 1e-6);
  EXPECT_NEAR(params[1] - before[1], cfg.learning_rate, 1e-6);
}

TEST(Adam, Errors) {
  qc::AdamConfig cfg;
  auto state = qc::AdamState::zeros(2);
  std::vector<double> params{0.0, 0.0};
  EXPECT_THROW(qc::adam_step(state, params, std::vector<double>{1.0}, cfg), std::invalid_argument);
  EXPECT_THROW(qc::adam_step(state, params, std::vector<double>{1.0, NAN}, cfg), qc::NumericalError);
}

TEST(Aggregate, Examples) {
  const std::vector<qc::RunMetrics> two{run_with_test_accuracy({0.8}, 0.7),
                                        run_with_test_accuracy({0.9}, 0.9)};
  const auto agg = qc::aggregate(two);
  EXPECT_NEAR(agg.curve.mean_test_accuracy[0], 0.85, 1e-15);
  EXPECT_NEAR(agg.curve.sem_test_accuracy[0], 0.05, 1e-15);
  EXPECT_NEAR(agg.row.mean_best_train, 0.8, 1e-15);
  EXPECT_EQ(agg.row.runs, 2U);

  const std::vector<qc::RunMetrics> one{run_with_test_accuracy({0.2, 0.6, 0.4}, 0.5)};
  const auto single = qc::aggregate(one);
  EXPECT_EQ(single.curve.mean_test_accuracy, (std::vector<double>{0.2, 0.6, 0.4}));
  EXPECT_EQ(single.curve.sem_test_accuracy, std::vector<double>(3, 0.0));
  EXPECT_EQ(single.row.mean_best_test, 0.6);

  const std::vector<qc::RunMetrics> same(10, run_with_test_accuracy({0.3, 0.5}, 0.5));
  EXPECT_EQ(qc::aggregate(same).curve.sem_test_accuracy, std::vector<double>(2, 0.0));

  const std::vector<qc::RunMetrics> ragged{run_with_test_accuracy({0.3}, 0.5),
                                           run_with_test_accuracy({0.3, 0.4}, 0.5)};
  EXPECT_THROW(qc::aggregate(ragged), std::invalid_argument);
  EXPECT_THROW(qc::aggregate(std::vector<qc::RunMetrics>{}), std::invalid_argument);
}

TEST(TrainConfigValidation, RejectsBadValues) {
  qc::TrainConfig c;
  c.epochs = 0;
  EXPECT_THROW(c.validate(), qc::ConfigError);
  c = {};
  c.minibatch = 0;
  EXPECT_THROW(c.validate(), qc::ConfigError);
  c = {};
  c.adam.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), qc::ConfigError);
}

TEST_F(Training, IsDeterministic) {
  const auto c = config(StrategyName::Easy, 4, 3);
  const auto a = qc::train_run(c, inputs());
  const auto b = qc::train_run(c, inputs());
  EXPECT_EQ(qc::metrics_csv(a, "h"), qc::metrics_csv(b, "h"));
  EXPECT_EQ(a.final_params, b.final_params);
  const auto other = qc::train_run(config(StrategyName::Easy, 4, 4), inputs());
  EXPECT_NE(a.final_params, other.final_params);
}

TEST_F(Training, StandardUsesWholeSetAndSingleStepIsOneAdamUpdate) {
  const auto run = qc::train_run(config(StrategyName::Standard, 3), inputs());
  for (const auto& e : run.epochs) {
    EXPECT_EQ(e.available, 50U);
    EXPECT_EQ(e.minibatches.size(), 5U);
    for (const auto& b : e.minibatches) {
      EXPECT_EQ(b.size(), 10U);
      EXPECT_EQ(std::set<std::size_t>(b.begin(), b.end()).size(), 10U);
    }
    EXPECT_GE(e.train_accuracy, 0.0);
    EXPECT_LE(e.test_accuracy, 1.0);
  }

  auto c = config(StrategyName::Standard, 1, 9);
  c.steps_per_epoch = 1;
  const auto one = qc::train_run(c, inputs());
  const auto arch = qc::build_qcnn(c.variant);
  const auto batch = qc::batch_of(train_->examples, one.epochs[0].minibatches[0]);
  auto theta = one.initial_params;
  auto state = qc::AdamState::zeros(theta.size());
  qc::adam_step(state, theta, qc::gradient(arch, theta, batch, 4), c.adam);
  for (std::size_t k = 0; k < theta.size(); ++k) EXPECT_NEAR(one.final_params[k], theta[k], 1e-15);
}

TEST_F(Training, HardestKeepsTenAvailable) {
  const auto run = qc::train_run(config(StrategyName::Hardest, 6, 1), inputs());
  std::set<std::vector<std::size_t>> seen;
  for (const auto& e : run.epochs) {
    EXPECT_EQ(e.available, 10U);
    std::set<std::size_t> members;
    for (const auto& b : e.minibatches) members.insert(b.begin(), b.end());
    EXPECT_LE(members.size(), 10U);
  }
}

TEST_F(Training, PacedAvailabilityGrowsToWholeSet) {
  auto c = config(StrategyName::Random, 10, 2);
  const auto run = qc::train_run(c, inputs());
  std::size_t prev = 0;
  for (const auto& e : run.epochs) {
    EXPECT_GE(e.available, prev);
    EXPECT_GE(e.available, 10U);
    EXPECT_LE(e.available, 50U);
    prev = e.available;
  }
  EXPECT_EQ(run.epochs.back().available, 50U);
}

TEST_F(Training, BestAccuraciesAreRunMaxima) {
  const auto run = qc::train_run(config(StrategyName::Standard, 6, 5), inputs());
  double best_train = 0.0;
  double best_test = 0.0;
  for (const auto& e : run.epochs) {
    best_train = std::max(best_train, e.train_accuracy);
    best_test = std::max(best_test, e.test_accuracy);
  }
  EXPECT_EQ(run.best_train_accuracy, best_train);
  EXPECT_EQ(run.best_test_accuracy, best_test);
  EXPECT_EQ(run.epochs[run.best_test_epoch - 1].test_accuracy, best_test);
}

TEST_F(Training, CheckpointResumeMatchesUninterruptedRun) {
  const auto dir = std::filesystem::temp_directory_path() / "qcurriculum_ckpt_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "run.json").string();
  std::filesystem::remove(path);
  const auto c = config(StrategyName::Easy, 6, 8);
  const auto full = qc::train_run(c, inputs());

  qc::CheckpointOptions first{path, false, 3};
  const auto partial = qc::train_run(c, inputs(), first);
  EXPECT_EQ(partial.epochs.size(), 3U);
  qc::CheckpointOptions rest{path, true, 0};
  const auto resumed = qc::train_run(c, inputs(), rest);
  EXPECT_EQ(qc::metrics_csv(resumed, "h"), qc::metrics_csv(full, "h"));
  EXPECT_EQ(resumed.final_params, full.final_params);
  EXPECT_EQ(resumed.best_train_params, full.best_train_params);

  auto other = c;
  other.run_seed = 99;
  EXPECT_THROW(qc::train_run(other, inputs(), rest), qc::IoError);
  std::filesystem::remove_all(dir);
}

TEST_F(Training, MetricsCsvFormat) {
  const auto run = qc::train_run(config(StrategyName::Standard, 2, 6), inputs());
  const auto csv = qc::metrics_csv(run, "abc123");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, qc::kMetricsCsvHeader);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.rfind(std::to_string(rows) + ",", 0), 0U);
    EXPECT_EQ(line.substr(line.size() - 7), ",abc123");
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
    EXPECT_EQ(std::count(line.begin(), line.end(), '|'), 4);
  }
  EXPECT_EQ(rows, 2);
}

TEST_F(Training, SelfTaughtNeedsReference) {
  auto c = config(StrategyName::Hard, 2, 1);
  c.loss_scorer = qc::LossScorer::SelfTaught;
  EXPECT_THROW(qc::train_run(c, inputs()), qc::ConfigError);
  const auto ref = qc::train_reference(c, *train_);
  auto in = inputs();
  in.reference_params = ref;
  const auto run = qc::train_run(c, in);
  EXPECT_EQ(run.epochs.size(), 2U);
  EXPECT_NE(qc::reference_seed(1), 1U);
}

TEST_F(Training, MinibatchRiskFallsEarly) {
  int falling = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto run = qc::train_run(config(StrategyName::Standard, 5, 100 + seed), {train_, nullptr, nullptr, {}});
    if (run.epochs.back().minibatch_risk < run.epochs.front().minibatch_risk) ++falling;
  }
  EXPECT_GE(falling, 8);
}
