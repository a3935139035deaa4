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

// Command-line driver for the experiment harness.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qcurriculum/errors.hpp"
#include "qcurriculum/file_io.hpp"
#include "qcurriculum/harness.hpp"

namespace qc = qcurriculum;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> out;
  std::optional<std::string> cache;
  std::optional<std::size_t> test_size;
  std::optional<std::string> params;
  bool quiet = false;
};

qc::ExperimentConfig resolve(const Flags& flags) {
  qc::ExperimentConfig config =
      flags.config.empty() ? qc::parse_config("") : qc::load_config(flags.config);
  qc::Overrides o;
  o.seed = flags.seed;
  o.jobs = flags.jobs;
  if (flags.out) o.out_dir = *flags.out;
  if (flags.cache) o.cache_dir = *flags.cache;
  o.test_size = flags.test_size;
  o.params = flags.params;
  qc::apply(config, o);
  return config;
}

void add_common(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config, "INI experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--cache", flags.cache, "cache directory");
  cmd->add_option("--test-size", flags.test_size, "test set size")->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", flags.quiet, "no progress on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcurriculum: curriculum strategies for QCNN phase classification"};
  app.require_subcommand(1);
  Flags flags;

  auto* generate = app.add_subcommand("generate", "generate or load the train and test sets");
  auto* train = app.add_subcommand("train", "run every (strategy, run) job");
  auto* dla = app.add_subcommand("dla", "matchgate Lie closure and report");
  auto* scan = app.add_subcommand("scan", "class probabilities along a phase-diagram cut");
  auto* props = app.add_subcommand("verify-props", "gradient profile and convex toy reports");
  auto* report = app.add_subcommand("report", "check and print the training summary");
  auto* config_cmd = app.add_subcommand("config", "print the resolved config with defaults");
  for (auto* cmd : {generate, train, dla, scan, props, report, config_cmd}) add_common(cmd, flags);
  scan->add_option("--params", flags.params, "parameter file written by train");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const qc::ExperimentConfig config = resolve(flags);
    qc::RunLog log(config.out_dir / "run.log", !flags.quiet);
    if (*generate) {
      const auto data = qc::cmd_generate(config, log);
      std::cout << fmt::format("{} train set(s) of {}, test set of {}\n", data.train.size(),
                               config.train_size, data.test.size());
    } else if (*train) {
      qc::cmd_train(config, log);
      std::cout << qc::cmd_report(config, log);
    } else if (*dla) {
      const auto basis = qc::cmd_dla(config, log);
      std::cout << fmt::format("dim {} ({})\n", basis.dim(), basis.generator_fingerprint);
    } else if (*scan) {
      const auto rows = qc::cmd_scan(config, log);
      std::cout << fmt::format("{} rows -> {}\n", rows.size(),
                               (config.out_dir / "scan.csv").string());
    } else if (*props) {
      const auto r = qc::cmd_verify_props(config, log);
      std::cout << fmt::format("prop1 hypothesis {}, conclusion {}\n",
                               r.prop1.hypothesis_non_increasing ? "holds" : "fails",
                               r.prop1.conclusion_all_fractions ? "holds" : "fails");
      std::cout << fmt::format("prop2 premise {}, mean risk {:.6g} (ordered) vs {:.6g} (random)\n",
                               r.prop2.premise_holds ? "holds" : "fails",
                               r.prop2.mean_risk_curriculum, r.prop2.mean_risk_random);
    } else if (*report) {
      std::cout << qc::cmd_report(config, log);
    } else if (*config_cmd) {
      std::cout << config.to_ini();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qc::exit_code(e);
  }
  return 0;
}
