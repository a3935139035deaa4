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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qcurriculum/random.hpp"
#include "qcurriculum/theory.hpp"
#include "support/helpers.hpp"

namespace qc = qcurriculum;

namespace {

std::vector<qc::LabeledExample> random_examples(std::size_t count, std::uint64_t seed) {
  qc::Rng rng(seed);
  std::vector<qc::LabeledExample> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].state = testing_support::random_state(8, rng);
    out[i].phase_index = static_cast<int>(i % 4);
    out[i].label = qc::one_hot(out[i].phase_index, 4);
  }
  return out;
}

// Random feature matrix and a realizable target.
void random_toy(std::size_t n, std::size_t d, std::uint64_t seed,
                std::vector<std::vector<double>>& features, std::vector<double>& targets) {
  qc::Rng rng(seed);
  std::vector<double> teacher(d);
  for (auto& w : teacher) w = rng.uniform(-1.0, 1.0);
  features.assign(n, std::vector<double>(d));
  targets.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      features[i][k] = k == 0 ? 1.0 : rng.uniform(-1.0, 1.0);
      targets[i] += teacher[k] * features[i][k];
    }
  }
}

}  // namespace

TEST(Profile, BinsCountsAndCdf) {
  const std::vector<double> scores{0.0, 0.1, 0.2, 0.5, 0.55, 0.9, 1.0};
  const std::vector<double> values{7, 6, 5, 4, 3, 2, 1};
  const auto p = qc::profile_from_values(scores, values, 4, 30, 70);
  ASSERT_EQ(p.bins(), 4U);
  EXPECT_EQ(p.bin_edges.front(), 0.0);
  EXPECT_EQ(p.bin_edges.back(), 1.0);
  EXPECT_EQ(p.bin_examples, (std::vector<std::size_t>{3, 0, 2, 2}));
  EXPECT_EQ(p.bin_count, (std::vector<std::size_t>{90, 0, 60, 60}));
  EXPECT_DOUBLE_EQ(p.bin_mean[0], 6.0);
  EXPECT_EQ(p.bin_mean[1], 0.0);
  EXPECT_DOUBLE_EQ(p.bin_mean[2], 3.5);
  EXPECT_TRUE(p.low_confidence[1]);
  EXPECT_FALSE(p.low_confidence[0]);
  EXPECT_TRUE(p.low_confidence[2]);
  EXPECT_EQ(p.cdf.back(), 1.0);
  EXPECT_TRUE(std::is_sorted(p.cdf.begin(), p.cdf.end()));
  EXPECT_TRUE(p.non_increasing());

  const auto flat = qc::profile_from_values(std::vector<double>(5, 0.3), std::vector<double>(5, 2.0), 10);
  EXPECT_EQ(flat.bins(), 1U);
  EXPECT_THROW(qc::profile_from_values(scores, std::vector<double>{1.0}, 4), std::invalid_argument);
}

TEST(Prop1, MonotoneProfileSatisfiesInequality) {
  std::vector<double> scores(40);
  std::vector<double> values(40);
  for (std::size_t i = 0; i < 40; ++i) {
    scores[i] = static_cast<double>(i) / 39.0;
    values[i] = 5.0 - 4.0 * scores[i];
  }
  const auto p = qc::profile_from_values(scores, values, 10);
  const std::vector<double> fractions{0.05, 0.2, 0.5, 0.8, 0.99, 1.0};
  const auto report = qc::prop1_check(p, fractions);
  EXPECT_TRUE(report.hypothesis_non_increasing);
  EXPECT_TRUE(report.conclusion_all_fractions);
  for (const auto& row : report.rows) {
    EXPECT_TRUE(row.holds);
    if (row.fraction < 1.0) {
      EXPECT_GT(row.ratio, 1.0);
    }
  }
  EXPECT_EQ(report.rows.back().ratio, 1.0);
  EXPECT_EQ(report.rows.back().subset_mean, report.rows.back().full_mean);
}

TEST(Prop1, RandomNonIncreasingProfilesAlwaysHold) {
  qc::Rng rng(17);
  const std::vector<double> fractions{0.1, 0.25, 0.33, 0.5, 0.75, 0.9, 1.0};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 10 + rng.below(60);
    std::vector<double> scores(n);
    for (auto& s : scores) s = rng.uniform();
    const double a = rng.uniform(0.1, 3.0);
    const double b = rng.uniform(0.0, 2.0);
    // A decreasing step function of the score, so bin means are non-increasing.
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = b + a * std::floor((1.0 - scores[i]) * 4.0);
    const std::size_t bins = 1 + rng.below(12);
    auto p = qc::profile_from_values(scores, values, bins);
    if (!p.non_increasing()) continue;
    const auto report = qc::prop1_check(p, fractions);
    EXPECT_TRUE(report.conclusion_all_fractions) << "trial " << trial;
    EXPECT_EQ(report.rows.back().ratio, 1.0);
  }
}

TEST(Prop1, ConstantProfileRatioIsOne) {
  qc::Rng rng(3);
  std::vector<double> scores(30);
  for (auto& s : scores) s = rng.uniform();
  const auto p = qc::profile_from_values(scores, std::vector<double>(30, 0.7), 10);
  const auto report = qc::prop1_check(p, std::vector<double>{0.1, 0.5, 1.0});
  for (const auto& row : report.rows) EXPECT_NEAR(row.ratio, 1.0, 1e-12);
  EXPECT_THROW(qc::prop1_check(p, std::vector<double>{0.0}), std::invalid_argument);
}

TEST(Prop1, IncreasingProfileReportsHypothesisFailure) {
  std::vector<double> scores{0.0, 0.25, 0.5, 0.75, 1.0};
  const auto p = qc::profile_from_values(scores, std::vector<double>{1, 2, 3, 4, 5}, 5);
  const auto report = qc::prop1_check(p, std::vector<double>{0.2, 1.0});
  EXPECT_FALSE(report.hypothesis_non_increasing);
  EXPECT_FALSE(report.rows.front().holds);
}

TEST(GradientVariance, Examples) {
  using G = std::vector<std::vector<double>>;
  EXPECT_EQ(qc::gradient_variance(G{{1.0, 2.0}}), 0.0);
  EXPECT_EQ(qc::gradient_variance(G{{1.0, 2.0}, {1.0, 2.0}}), 0.0);
  EXPECT_DOUBLE_EQ(qc::gradient_variance(G{{3.0, -4.0}, {-3.0, 4.0}}), 25.0);
  EXPECT_THROW(qc::gradient_variance(G{}), std::invalid_argument);
  EXPECT_THROW(qc::gradient_variance(G{{1.0}, {1.0, 2.0}}), std::invalid_argument);
}

TEST(GradientVariance, PermutationAndShiftInvariant) {
  qc::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> g(2 + rng.below(10), std::vector<double>(6));
    for (auto& v : g) {
      for (auto& x : v) x = rng.uniform(-2.0, 2.0);
    }
    const double base = qc::gradient_variance(g);
    EXPECT_GE(base, 0.0);
    auto shuffled = g;
    rng.shuffle(std::span<std::vector<double>>(shuffled));
    EXPECT_NEAR(qc::gradient_variance(shuffled), base, 1e-12);
    std::vector<double> c(6);
    for (auto& x : c) x = rng.uniform(-5.0, 5.0);
    auto shifted = g;
    for (auto& v : shifted) {
      for (std::size_t k = 0; k < 6; ++k) v[k] += c[k];
    }
    EXPECT_NEAR(qc::gradient_variance(shifted), base, 1e-10);
  }
}

TEST(GradientVariance, CircuitOverload) {
  const auto data = random_examples(3, 7);
  const auto arch = qc::build_qcnn(qc::QcnnVariant::Matchgate);
  const auto theta = qc::random_params(arch, 1).theta;
  EXPECT_EQ(qc::gradient_variance(arch, theta, qc::batch_of(std::span(data).first(1)), 4), 0.0);
  std::vector<std::vector<double>> g;
  for (const auto& e : data) g.push_back(qc::example_gradient(arch, theta, e, 4).gradient);
  EXPECT_NEAR(qc::gradient_variance(arch, theta, qc::batch_of(data), 4), qc::gradient_variance(g),
              1e-14);
}

TEST(EstimateG, UniformScoresGiveOneBin) {
  const auto data = random_examples(4, 9);
  const auto arch = qc::build_qcnn(qc::QcnnVariant::Matchgate);
  qc::EstimateOptions opt;
  opt.param_samples = 30;
  const auto p = qc::estimate_G(arch, data, std::vector<double>(4, 0.0), 4, opt);
  EXPECT_EQ(p.bins(), 1U);
  EXPECT_EQ(p.bin_count[0], 120U);
  const double mean = std::accumulate(p.example_mean.begin(), p.example_mean.end(), 0.0) / 4.0;
  EXPECT_NEAR(p.bin_mean[0], mean, 1e-12);
  opt.param_samples = 29;
  EXPECT_THROW(qc::estimate_G(arch, data, std::vector<double>(4, 0.0), 4, opt),
               std::invalid_argument);
}

TEST(EstimateG, DuplicatedDatasetGivesSameProfile) {
  const auto data = random_examples(3, 10);
  auto doubled = data;
  doubled.insert(doubled.end(), data.begin(), data.end());
  const std::vector<double> scores{0.1, 0.6, 0.9};
  std::vector<double> scores2 = scores;
  scores2.insert(scores2.end(), scores.begin(), scores.end());
  const auto arch = qc::build_qcnn(qc::QcnnVariant::Matchgate);
  qc::EstimateOptions opt;
  opt.param_samples = 30;
  opt.bins = 4;
  const auto a = qc::estimate_G(arch, data, scores, 4, opt);
  const auto b = qc::estimate_G(arch, doubled, scores2, 4, opt);
  EXPECT_EQ(a.bin_edges, b.bin_edges);
  for (std::size_t k = 0; k < a.bins(); ++k) EXPECT_NEAR(a.bin_mean[k], b.bin_mean[k], 1e-14);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(b.example_mean[i], b.example_mean[i + 3]);
    EXPECT_EQ(a.example_mean[i], b.example_mean[i]);
  }
  opt.jobs = 3;
  EXPECT_EQ(qc::estimate_G(arch, data, scores, 4, opt).example_mean, a.example_mean);
}

TEST(Prop2, IdenticalExamplesCoincide) {
  const std::vector<std::vector<double>> features(20, std::vector<double>{1.0, 0.4, -0.3});
  const std::vector<double> targets(20, 0.25);
  qc::Prop2Options opt;
  opt.seeds = 5;
  opt.epochs = 10;
  const auto r = qc::prop2_toy_check(features, targets, opt);
  EXPECT_EQ(r.risk_curriculum, r.risk_random);
  EXPECT_TRUE(r.premise_holds);
  EXPECT_TRUE(r.ordering_holds);
  for (const double s : r.sigma2_curriculum) EXPECT_LT(s, 1e-24);
  for (const double s : r.sigma2_random) EXPECT_LT(s, 1e-24);
}

TEST(Prop2, GapShrinksWithLongerTraining) {
  std::vector<std::vector<double>> features;
  std::vector<double> targets;
  random_toy(50, 6, 21, features, targets);
  qc::Prop2Options opt;
  opt.seeds = 10;
  opt.epochs = 10;
  const auto short_run = qc::prop2_toy_check(features, targets, opt);
  opt.epochs = 200;
  const auto long_run = qc::prop2_toy_check(features, targets, opt);
  const double short_gap = std::abs(short_run.mean_risk_curriculum - short_run.mean_risk_random);
  const double long_gap = std::abs(long_run.mean_risk_curriculum - long_run.mean_risk_random);
  EXPECT_LT(long_gap, short_gap);
  EXPECT_LT(long_run.mean_risk_random, short_run.mean_risk_random);
  EXPECT_LT(long_run.mean_risk_curriculum, short_run.mean_risk_curriculum);
}

TEST(Prop2, ReportShapeAndDeterminism) {
  std::vector<std::vector<double>> features;
  std::vector<double> targets;
  random_toy(30, 4, 3, features, targets);
  qc::Prop2Options opt;
  opt.seeds = 4;
  opt.epochs = 12;
  const auto a = qc::prop2_toy_check(features, targets, opt);
  const auto b = qc::prop2_toy_check(features, targets, opt);
  EXPECT_EQ(a.risk_curriculum, b.risk_curriculum);
  EXPECT_EQ(a.sigma2_curriculum.size(), 12U);
  EXPECT_EQ(a.sigma2_curriculum_initial.size(), 12U);
  EXPECT_EQ(a.risk_trace_random.size(), 12U);
  EXPECT_EQ(a.risk_curriculum.size(), 4U);
  for (const double s : a.sigma2_random) EXPECT_GE(s, 0.0);
  for (const auto t : a.premise_failures) {
    EXPECT_GT(a.sigma2_curriculum[t - 1], a.sigma2_random[t - 1]);
  }
  EXPECT_EQ(a.premise_holds, a.premise_failures.empty());
  EXPECT_EQ(a.ordering_holds,
            a.mean_risk_curriculum <= a.mean_risk_random + a.sem_difference);
  opt.seeds = 0;
  EXPECT_THROW(qc::prop2_toy_check(features, targets, opt), std::invalid_argument);
}

TEST(Prop2, SurrogateFeatures) {
  const auto data = random_examples(3, 12);
  const auto f = qc::surrogate_features(data, 4);
  ASSERT_EQ(f.size(), 3U);
  EXPECT_EQ(f[0].size(), 1U + 8U + 7U);
  for (const auto& row : f) {
    EXPECT_EQ(row[0], 1.0);
    for (const double x : row) EXPECT_LE(std::abs(x), 1.0 + 1e-12);
  }
  EXPECT_EQ(qc::surrogate_features(data, 4), f);
}
