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
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "qcurriculum/errors.hpp"
#include "qcurriculum/file_io.hpp"
#include "qcurriculum/harness.hpp"

namespace qc = qcurriculum;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / name) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

qc::ExperimentConfig tiny(const fs::path& root) {
  auto c = qc::parse_config(
      "[experiment]\nfamily = self-taught\nstrategies = standard, hard\nruns = 2\nseed = 3\n"
      "[data]\ntrain_size = 8\ntest_size = 8\n"
      "[train]\nepochs = 3\nsteps_per_epoch = 2\nminibatch = 4\n");
  c.out_dir = root / "out";
  c.cache_dir = root / "cache";
  return c;
}

}  // namespace

TEST(Config, DefaultsAndRoundTrip) {
  const auto c = qc::parse_config("");
  EXPECT_EQ(c.experiment, qc::ExperimentFamily::SelfPaced);
  EXPECT_EQ(c.runs, 10U);
  EXPECT_EQ(c.train_size, 50U);
  EXPECT_EQ(c.train.epochs, 100U);
  EXPECT_EQ(c.train.minibatch, 10U);
  EXPECT_EQ(c.train.steps_per_epoch, 5U);
  EXPECT_DOUBLE_EQ(c.train.adam.learning_rate, 0.01);
  EXPECT_EQ(c.train.variant, qc::QcnnVariant::Full);
  EXPECT_EQ(c.cut.points, 121U);

  const auto back = qc::parse_config(c.to_ini());
  EXPECT_EQ(back.to_ini(), c.to_ini());
  EXPECT_EQ(back.hash(), c.hash());

  auto moved = c;
  moved.out_dir = "elsewhere";
  moved.jobs = 4;
  EXPECT_EQ(moved.hash(), c.hash());
  moved.seed = 1;
  EXPECT_NE(moved.hash(), c.hash());
}

TEST(Config, FamilyDefaults) {
  const auto taught = qc::parse_config("[experiment]\nfamily = self-taught\n");
  EXPECT_EQ(taught.loss_scorer(), qc::LossScorer::SelfTaught);
  EXPECT_NE(std::find(taught.strategies.begin(), taught.strategies.end(), qc::StrategyName::Random),
            taught.strategies.end());
  const auto physics = qc::parse_config("[experiment]\nfamily = physics\n");
  EXPECT_EQ(physics.train.variant, qc::QcnnVariant::Matchgate);
  const auto xxz = qc::parse_config("[model]\nfamily = xxz\n");
  EXPECT_EQ(xxz.cut.swept, "ratio");
  EXPECT_EQ(xxz.model.num_classes(), 3U);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(qc::parse_config("[nonsense]\na = 1\n"), qc::ConfigError);
  EXPECT_THROW(qc::parse_config("[train]\nepochz = 3\n"), qc::ConfigError);
  EXPECT_THROW(qc::parse_config("[train]\nepochs = many\n"), qc::ConfigError);
  EXPECT_THROW(qc::parse_config("[experiment]\nfamily = physics\n[train]\nvariant = full\n"),
               qc::ConfigError);
  EXPECT_THROW(qc::parse_config("[experiment]\nfamily = self-taught\nstrategies = hardest\n"),
               qc::ConfigError);
  EXPECT_THROW(qc::parse_config("[experiment]\nstrategies = standard, standard\n"), qc::ConfigError);
  EXPECT_THROW(qc::parse_config("[props]\nparam_samples = 10\n"), qc::ConfigError);
  EXPECT_THROW(qc::parse_config("[model]\nn = 6\n"), qc::ConfigError);
  EXPECT_THROW(qc::load_config("/nonexistent/qcurriculum.ini"), qc::IoError);
}

TEST(Config, OverridesApply) {
  auto c = qc::parse_config("");
  qc::Overrides o;
  o.seed = 42;
  o.jobs = 2;
  o.test_size = 17;
  o.out_dir = "x";
  qc::apply(c, o);
  EXPECT_EQ(c.seed, 42U);
  EXPECT_EQ(c.jobs, 2U);
  EXPECT_EQ(c.test_size, 17U);
  EXPECT_EQ(c.out_dir, fs::path("x"));
}

TEST(Cut, GridAndValidation) {
  qc::CutSpec cut;
  EXPECT_DOUBLE_EQ(cut.value(0), -3.0);
  EXPECT_DOUBLE_EQ(cut.value(120), 3.0);
  EXPECT_NEAR(cut.value(60), 0.0, 1e-15);
  EXPECT_EQ(cut.couplings(0).j1, 1.0);
  EXPECT_EQ(cut.couplings(0).j2, -3.0);
  EXPECT_EQ(cut.fixed_name(), "j1");
  const auto model = qc::ModelSpec::cluster();
  EXPECT_NO_THROW(cut.validate(model));
  auto bad = cut;
  bad.points = 1;
  EXPECT_THROW(bad.validate(model), qc::ConfigError);
  bad = cut;
  bad.swept = "delta";
  EXPECT_THROW(bad.validate(model), qc::ConfigError);
  bad = cut;
  bad.high = 9.0;
  EXPECT_THROW(bad.validate(model), qc::ConfigError);
}

TEST(Scan, RowsAndTransitions) {
  const auto arch = qc::build_qcnn(qc::QcnnVariant::Full);
  const auto theta = qc::random_params(arch, 1).theta;
  const auto model = qc::ModelSpec::cluster();
  const qc::CutSpec cut;
  const auto rows = qc::scan_cut(arch, theta, model, cut, qc::PhaseTable::builtin(model.family));
  ASSERT_EQ(rows.size(), 121U);
  for (const auto& r : rows) {
    ASSERT_EQ(r.probs.size(), 4U);
    EXPECT_NEAR(std::accumulate(r.probs.begin(), r.probs.end(), 0.0), 1.0, 1e-12);
    EXPECT_EQ(r.predicted, qc::predict_class(r.probs, 4));
    EXPECT_EQ(r.true_phase, qc::label_cluster(1.0, r.coupling));
  }
  const auto truth = qc::true_transitions(rows);
  ASSERT_EQ(truth.size(), 3U);
  EXPECT_NEAR(truth[0], -2.0, 0.05);
  EXPECT_NEAR(truth[1], 0.0, 0.05);
  EXPECT_NEAR(truth[2], 1.0, 0.05);

  const auto csv = qc::scan_csv(rows, 4, "feed");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "coupling,true_phase,p_class_0,p_class_1,p_class_2,p_class_3,predicted,config_hash");
  int count = 0;
  while (std::getline(in, line)) ++count;
  EXPECT_EQ(count, 121);
}

TEST(Scan, TransitionsFromLabels) {
  std::vector<qc::ScanRow> rows(5);
  const int predicted[] = {1, 1, 3, 3, 0};
  for (int i = 0; i < 5; ++i) {
    rows[i].coupling = i;
    rows[i].predicted = predicted[i];
    rows[i].true_phase = 2;
  }
  EXPECT_EQ(qc::predicted_transitions(rows), (std::vector<double>{1.5, 3.5}));
  EXPECT_TRUE(qc::true_transitions(rows).empty());
}

TEST(ExitCodes, MapErrorKinds) {
  EXPECT_EQ(qc::exit_code(qc::ConfigError("x")), 1);
  EXPECT_EQ(qc::exit_code(qc::NumericalError("x")), 2);
  EXPECT_EQ(qc::exit_code(qc::IoError("x")), 3);
  EXPECT_EQ(qc::exit_code(fs::filesystem_error("x", std::error_code())), 3);
  EXPECT_EQ(qc::exit_code(std::runtime_error("x")), 1);
}

TEST(Params, RoundTripAndVariantCheck) {
  TempDir dir("qcurriculum_params_test");
  const auto arch = qc::build_qcnn(qc::QcnnVariant::Matchgate);
  const auto theta = qc::random_params(arch, 2).theta;
  const auto path = dir.path() / "p.json";
  qc::write_file_atomic(path, qc::params_json(qc::QcnnVariant::Matchgate, theta, "h"));
  EXPECT_EQ(qc::load_params(path, qc::QcnnVariant::Matchgate), theta);
  EXPECT_THROW(qc::load_params(path, qc::QcnnVariant::Full), qc::ConfigError);
  qc::write_file_atomic(path, "{\"format\": \"something-else\"}");
  EXPECT_THROW(qc::load_params(path, qc::QcnnVariant::Matchgate), qc::IoError);
}

TEST(Commands, GenerateUsesCache) {
  TempDir dir("qcurriculum_generate_test");
  const auto c = tiny(dir.path());
  qc::RunLog quiet({}, false);
  const auto first = qc::cmd_generate(c, quiet);
  EXPECT_EQ(first.train.size(), 2U);
  EXPECT_EQ(first.test.size(), 8U);
  EXPECT_NE(first.train[0].examples[0].couplings.j2, first.train[1].examples[0].couplings.j2);
  qc::RunLog log({}, false);
  const auto second = qc::cmd_generate(c, log);
  EXPECT_EQ(std::count_if(log.lines().begin(), log.lines().end(),
                          [](const std::string& l) { return l.find("cache hit") != std::string::npos; }),
            3);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(second.test.examples[i].couplings.j1, first.test.examples[i].couplings.j1);
    EXPECT_EQ(second.test.examples[i].phase_index, first.test.examples[i].phase_index);
  }
}

TEST(Commands, DlaCacheFingerprintMismatch) {
  TempDir dir("qcurriculum_dla_test");
  auto c = tiny(dir.path());
  qc::RunLog log({}, false);
  const auto basis = qc::cmd_dla(c, log);
  EXPECT_EQ(basis.dim(), 120U);
  EXPECT_TRUE(fs::exists(c.out_dir / "dla_report.json"));
  EXPECT_EQ(qc::cmd_dla(c, log).dim(), 120U);

  auto gens = qc::matchgate_generators(8);
  std::reverse(gens.begin(), gens.end());
  qc::save_basis((c.cache_dir / "lie" / "matchgate-n8.json").string(), qc::lie_closure(gens));
  EXPECT_THROW(qc::cmd_dla(c, log), qc::IoError);
}

TEST(Commands, TrainThenReportIsConsistent) {
  TempDir dir("qcurriculum_train_test");
  const auto c = tiny(dir.path());
  qc::RunLog log({}, false);
  const auto summary = qc::cmd_train(c, log);
  EXPECT_EQ(summary.config_hash, c.hash());
  ASSERT_EQ(summary.rows.size(), 2U);
  EXPECT_EQ(summary.row(qc::StrategyName::Hard).best_test.size(), 2U);
  for (const char* name : {"standard-run0", "standard-run1", "hard-run0", "hard-run1"}) {
    EXPECT_TRUE(fs::exists(c.out_dir / "metrics" / (std::string(name) + ".csv"))) << name;
    EXPECT_TRUE(fs::exists(c.out_dir / "params" / (std::string(name) + ".json"))) << name;
  }
  const auto table = qc::cmd_report(c, log);
  EXPECT_NE(table.find("hard"), std::string::npos);

  // A second execution writes byte-identical metrics.
  const auto csv = qc::read_file(c.out_dir / "metrics" / "hard-run1.csv");
  qc::cmd_train(c, log);
  EXPECT_EQ(qc::read_file(c.out_dir / "metrics" / "hard-run1.csv"), csv);

  // Scanning the trained parameters.
  auto scan = c;
  scan.scan_params = (c.out_dir / "params" / "standard-run0.json").string();
  EXPECT_EQ(qc::cmd_scan(scan, log).size(), 121U);
  EXPECT_TRUE(fs::exists(c.out_dir / "scan.csv"));

  // Editing a metrics file breaks the consistency check.
  std::string edited = csv;
  const auto row = edited.find('\n') + 1;
  const auto first_comma = edited.find(',', row);
  const auto second_comma = edited.find(',', first_comma + 1);
  const auto third_comma = edited.find(',', second_comma + 1);
  edited.replace(second_comma + 1, third_comma - second_comma - 1, "1.5");
  qc::write_file_atomic(c.out_dir / "metrics" / "hard-run1.csv", edited);
  EXPECT_THROW(qc::cmd_report(c, log), qc::IoError);

  auto other = c;
  other.seed = 99;
  EXPECT_THROW(qc::cmd_report(other, log), qc::IoError);
}
