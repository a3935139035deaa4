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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcurriculum/curriculum.hpp"
#include "qcurriculum/lie_algebra.hpp"
#include "qcurriculum/spin_models.hpp"
#include "qcurriculum/theory.hpp"
#include "qcurriculum/training.hpp"

namespace qcurriculum {

enum class ExperimentFamily { SelfTaught, SelfPaced, Physics };

std::string_view to_string(ExperimentFamily family);
ExperimentFamily parse_experiment_family(std::string_view name);

/// A straight line through the phase diagram: one coupling held fixed, the
/// other swept over [low, high] in `points` evenly spaced steps.
struct CutSpec {
  ModelFamily family = ModelFamily::Cluster;
  /// "j1" or "j2" for the cluster family, "ratio" or "delta" for XXZ.
  std::string swept = "j2";
  double fixed = 1.0;
  double low = -3.0;
  double high = 3.0;
  std::size_t points = 121;

  std::string fixed_name() const;
  double value(std::size_t i) const;
  Couplings couplings(std::size_t i) const;
  /// Throws ConfigError for fewer than 2 points, an unknown coupling name,
  /// or a sweep outside the model's ranges.
  void validate(const ModelSpec& model) const;
};

struct ExperimentConfig {
  ExperimentFamily experiment = ExperimentFamily::SelfPaced;
  ModelSpec model = ModelSpec::cluster();
  /// Empty: the compiled-in boundary table.
  std::string phase_table;
  std::vector<StrategyName> strategies{StrategyName::Standard, StrategyName::Easy,
                                       StrategyName::Hard, StrategyName::Hardest};
  std::size_t runs = 10;
  std::uint64_t seed = 0;

  std::size_t train_size = 50;
  std::size_t test_size = 1000;
  bool balanced = true;
  /// Every run trains on its own draw of `train_size` ground states.
  bool train_per_run = true;

  /// Template for every job; strategy, loss scorer and run seed are filled
  /// in per (strategy, run).
  TrainConfig train;

  std::vector<double> fractions{0.2, 0.5, 1.0};
  EstimateOptions estimate;
  Prop2Options prop2;

  std::string scan_params;
  CutSpec cut;

  std::filesystem::path out_dir = "out";
  std::filesystem::path cache_dir = "cache";
  std::size_t jobs = 1;

  /// Throws ConfigError when the combination cannot run.
  void validate() const;
  /// Every setting as INI text, defaults included. Round-trips through
  /// parse_config.
  std::string to_ini() const;
  /// Hash of to_ini() without the [output] section, so paths and worker
  /// counts do not change it.
  std::string hash() const;
  LossScorer loss_scorer() const;
  const PhaseTable& table() const;

 private:
  mutable std::optional<PhaseTable> loaded_table_;
};

/// Parses INI text. Unknown sections or keys and malformed values raise
/// ConfigError; missing keys keep their defaults.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Command-line overrides applied after the file is read.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::size_t> test_size;
  std::optional<std::string> params;
};
void apply(ExperimentConfig& config, const Overrides& overrides);

/// Timestamped progress lines; kept out of every result file.
class RunLog {
 public:
  explicit RunLog(std::filesystem::path path = {}, bool echo = true);
  void info(std::string_view message);
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  std::filesystem::path path_;
  bool echo_ = true;
  std::vector<std::string> lines_;
};

struct Datasets {
  std::vector<Dataset> train;  // one per run, or a single shared set
  Dataset test;
  const Dataset& train_for(std::size_t run) const {
    return train.size() == 1 ? train.front() : train.at(run);
  }
};

/// Seeds of the datasets and runs, derived from the config's master seed.
std::uint64_t train_data_seed(const ExperimentConfig& config, std::size_t run);
std::uint64_t test_data_seed(const ExperimentConfig& config);
std::uint64_t run_seed(const ExperimentConfig& config, std::size_t run);

/// Loads or generates the datasets under <cache>/datasets. Cache entries
/// are keyed by the model, size, seed and balance settings only.
Datasets cmd_generate(const ExperimentConfig& config, RunLog& log);

/// Loads or computes the matchgate basis under <cache>/lie and writes
/// <out>/dla_report.json.
LieBasis cmd_dla(const ExperimentConfig& config, RunLog& log);

struct StrategySummary {
  StrategyName strategy = StrategyName::Standard;
  Aggregate aggregate;
  std::vector<double> best_test;   // per run
  std::vector<double> best_train;  // per run
};

struct TrainSummary {
  std::string config_hash;
  std::vector<StrategySummary> rows;
  const StrategySummary& row(StrategyName name) const;
};

/// Runs every (strategy, run) job and writes
///   <out>/metrics/<strategy>-run<r>.csv
///   <out>/params/<strategy>-run<r>.json
///   <out>/summary.json
TrainSummary cmd_train(const ExperimentConfig& config, RunLog& log);

struct ScanRow {
  double coupling = 0.0;
  int true_phase = 0;
  std::vector<double> probs;  // first M outcomes
  int predicted = 0;
};

std::vector<ScanRow> scan_cut(const QcnnArchitecture& arch, std::span<const double> theta,
                              const ModelSpec& model, const CutSpec& cut,
                              const PhaseTable& table);
std::string scan_csv(const std::vector<ScanRow>& rows, std::size_t classes,
                     const std::string& config_hash);
/// Swept-coupling midpoints between consecutive rows whose predicted (or
/// true) class differs.
std::vector<double> predicted_transitions(const std::vector<ScanRow>& rows);
std::vector<double> true_transitions(const std::vector<ScanRow>& rows);

/// Reads trained parameters from config.scan_params and writes
/// <out>/scan.csv.
std::vector<ScanRow> cmd_scan(const ExperimentConfig& config, RunLog& log);

struct PropsResult {
  GradientProfile profile;
  Prop1Report prop1;
  Prop2Report prop2;
};

/// Physics-score gradient profile on the first training set with the
/// matchgate circuit, the binned profile inequality, and the convex toy.
/// Writes <out>/prop1_report.json and <out>/prop2_report.json.
PropsResult cmd_verify_props(const ExperimentConfig& config, RunLog& log);

std::string prop1_report_json(const GradientProfile& profile, const Prop1Report& report,
                              const std::string& config_hash);
std::string prop2_report_json(const Prop2Report& report, const std::string& config_hash);

/// Re-reads summary.json and the metrics CSVs, checks that each summary
/// best accuracy equals the CSV column maximum and that every file carries
/// the same config hash, and returns the summary table as text. Throws
/// IoError on any mismatch.
std::string cmd_report(const ExperimentConfig& config, RunLog& log);

/// 1 for ConfigError, 2 for NumericalError, 3 for IoError and filesystem
/// errors, 1 for anything else.
int exit_code(const std::exception& error);

/// Parameter files written by cmd_train and read by cmd_scan.
std::string params_json(QcnnVariant variant, std::span<const double> theta,
                        const std::string& config_hash);
std::vector<double> load_params(const std::filesystem::path& path, QcnnVariant expected);

}  // namespace qcurriculum
