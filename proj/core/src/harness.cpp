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

#include "qcurriculum/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qcurriculum/dataset_io.hpp"
#include "qcurriculum/errors.hpp"
#include "qcurriculum/file_io.hpp"
#include "qcurriculum/hash.hpp"
#include "qcurriculum/parallel.hpp"
#include "qcurriculum/random.hpp"

namespace qcurriculum {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kTrainDataStream = 0x747261696eULL;  // "train"
constexpr std::uint64_t kTestDataStream = 0x74657374ULL;     // "test"
constexpr std::uint64_t kRunStream = 0x72756eULL;            // "run"
constexpr std::uint64_t kPropsStream = 0x70726f7073ULL;      // "props"

// ---- INI value parsing ----------------------------------------------------

std::string where(std::string_view section, std::string_view key) {
  return fmt::format("[{}] {}", section, key);
}

std::uint64_t to_uint(const std::string& text, std::string_view section, std::string_view key) {
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    if (!text.empty() && text.front() == '-') throw std::invalid_argument("negative");
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ConfigError(fmt::format("{}: expected a non-negative integer, got '{}'",
                                  where(section, key), text));
  }
  return value;
}

double to_double(const std::string& text, std::string_view section, std::string_view key) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value)) {
    throw ConfigError(
        fmt::format("{}: expected a finite number, got '{}'", where(section, key), text));
  }
  return value;
}

bool to_bool(const std::string& text, std::string_view section, std::string_view key) {
  const std::string t = boost::algorithm::to_lower_copy(text);
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", where(section, key), text));
}

std::vector<std::string> to_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

/// Reads one section, rejecting keys it does not know.
class Section {
 public:
  Section(const boost::property_tree::ptree* tree, std::string name, std::set<std::string> keys)
      : tree_(tree), name_(std::move(name)), keys_(std::move(keys)) {
    if (tree_ == nullptr) return;
    for (const auto& [key, child] : *tree_) {
      if (!child.empty()) throw ConfigError(fmt::format("[{}] {}: nested value", name_, key));
      if (!keys_.contains(key)) throw ConfigError(fmt::format("unknown key {}", where(name_, key)));
    }
  }

  std::optional<std::string> raw(const std::string& key) const {
    if (tree_ == nullptr) return std::nullopt;
    const auto value = tree_->get_optional<std::string>(key);
    if (!value) return std::nullopt;
    return boost::algorithm::trim_copy(*value);
  }
  bool has(const std::string& key) const { return raw(key).has_value(); }

  void get(const std::string& key, std::string& out) const {
    if (auto v = raw(key)) out = *v;
  }
  void get(const std::string& key, fs::path& out) const {
    if (auto v = raw(key)) out = *v;
  }
  void get(const std::string& key, bool& out) const {
    if (auto v = raw(key)) out = to_bool(*v, name_, key);
  }
  void get(const std::string& key, double& out) const {
    if (auto v = raw(key)) out = to_double(*v, name_, key);
  }
  void get(const std::string& key, std::size_t& out) const {
    if (auto v = raw(key)) out = static_cast<std::size_t>(to_uint(*v, name_, key));
  }
  void get_u64(const std::string& key, std::uint64_t& out) const {
    if (auto v = raw(key)) out = to_uint(*v, name_, key);
  }

 private:
  const boost::property_tree::ptree* tree_;
  std::string name_;
  std::set<std::string> keys_;
};

std::vector<StrategyName> default_strategies(ExperimentFamily family) {
  switch (family) {
    case ExperimentFamily::SelfTaught:
      return {StrategyName::Standard, StrategyName::Random, StrategyName::Easy, StrategyName::Hard};
    case ExperimentFamily::SelfPaced:
      return {StrategyName::Standard, StrategyName::Easy, StrategyName::Hard,
              StrategyName::Hardest};
    case ExperimentFamily::Physics:
      return {StrategyName::Standard, StrategyName::HigherPg, StrategyName::LowerPg};
  }
  return {};
}

bool strategy_allowed(ExperimentFamily family, StrategyName s) {
  switch (family) {
    case ExperimentFamily::SelfTaught:
      return s == StrategyName::Standard || s == StrategyName::Random ||
             s == StrategyName::Easy || s == StrategyName::Hard;
    case ExperimentFamily::SelfPaced:
      return s == StrategyName::Standard || s == StrategyName::Random ||
             s == StrategyName::Easy || s == StrategyName::Hard || s == StrategyName::Hardest;
    case ExperimentFamily::Physics:
      return s == StrategyName::Standard || s == StrategyName::Random ||
             s == StrategyName::HigherPg || s == StrategyName::LowerPg;
  }
  return false;
}

CutSpec default_cut(ModelFamily family) {
  CutSpec cut;
  cut.family = family;
  if (family == ModelFamily::Xxz) {
    cut.swept = "ratio";
    cut.fixed = 3.0;
    cut.low = 0.025;
    cut.high = 3.0;
    cut.points = 120;
  }
  return cut;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ", ";
    out += parts[i];
  }
  return out;
}

std::string format_doubles(std::span<const double> values) {
  std::vector<std::string> parts;
  for (const double v : values) parts.push_back(fmt::format("{}", v));
  return join(parts);
}

bool inside(double v, const CouplingRange& r) { return v >= r.low && v <= r.high; }

const CouplingRange& range_of(const ModelSpec& model, const std::string& name) {
  if (name == "j1") return model.j1;
  if (name == "j2") return model.j2;
  if (name == "ratio") return model.ratio;
  return model.delta;
}

std::string strategy_file_stem(StrategyName s, std::size_t run) {
  return fmt::format("{}-run{}", to_string(s), run);
}

std::string dataset_key(const ExperimentConfig& config, DatasetRole role, std::size_t count,
                        std::uint64_t seed) {
  const ModelSpec& m = config.model;
  std::string text = fmt::format(
      "family={} n={} periodic={} j1=[{},{}] j2=[{},{}] ratio=[{},{}] delta=[{},{}] role={} "
      "count={} seed={} balanced={}",
      to_string(m.family), m.n, m.periodic, m.j1.low, m.j1.high, m.j2.low, m.j2.high,
      m.ratio.low, m.ratio.high, m.delta.low, m.delta.high, to_string(role), count, seed,
      config.balanced);
  if (!config.phase_table.empty()) text += " table=" + read_file(config.phase_table);
  return hex64(fnv1a64(text));
}

Dataset load_or_generate(const ExperimentConfig& config, DatasetRole role, std::size_t count,
                         std::uint64_t seed, RunLog& log) {
  const std::string key = dataset_key(config, role, count, seed);
  const fs::path stem = config.cache_dir / "datasets" /
                        fmt::format("{}-{}-{}", to_string(config.model.family), to_string(role), key);
  if (dataset_exists(stem)) {
    log.info(fmt::format("cache hit: {}", stem.string()));
    return load_dataset(stem);
  }
  GenerateOptions options;
  options.balanced = config.balanced;
  options.jobs = config.jobs;
  Dataset d = generate_dataset(config.model, count, seed, role, options, &config.table());
  save_dataset(d, stem, key);
  log.info(fmt::format("generated {} {} examples: {}", count, to_string(role), stem.string()));
  return d;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

json aggregate_json(const StrategySummary& s, std::size_t runs) {
  const auto& row = s.aggregate.row;
  json metrics = json::array();
  for (std::size_t r = 0; r < runs; ++r) {
    metrics.push_back("metrics/" + strategy_file_stem(s.strategy, r) + ".csv");
  }
  return {{"strategy", to_string(s.strategy)},
          {"runs", row.runs},
          {"mean_best_train", row.mean_best_train},
          {"sem_best_train", row.sem_best_train},
          {"mean_best_test", row.mean_best_test},
          {"sem_best_test", row.sem_best_test},
          {"best_train", s.best_train},
          {"best_test", s.best_test},
          {"metrics", metrics},
          {"curve",
           {{"mean_train_accuracy", s.aggregate.curve.mean_train_accuracy},
            {"sem_train_accuracy", s.aggregate.curve.sem_train_accuracy},
            {"mean_test_accuracy", s.aggregate.curve.mean_test_accuracy},
            {"sem_test_accuracy", s.aggregate.curve.sem_test_accuracy}}}};
}

std::string summary_table(const std::string& config_hash, const json& rows) {
  std::string out = fmt::format("config {}\n{:<10} {:>4}  {:>16}  {:>16}\n", config_hash,
                                "strategy", "runs", "best train (%)", "best test (%)");
  for (const auto& r : rows) {
    out += fmt::format("{:<10} {:>4}  {:>7.2f} ± {:<6.2f}  {:>7.2f} ± {:<6.2f}\n",
                       r.at("strategy").get<std::string>(), r.at("runs").get<std::size_t>(),
                       100.0 * r.at("mean_best_train").get<double>(),
                       100.0 * r.at("sem_best_train").get<double>(),
                       100.0 * r.at("mean_best_test").get<double>(),
                       100.0 * r.at("sem_best_test").get<double>());
  }
  return out;
}

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw IoError(fmt::format("{}: malformed JSON ({})", path.string(), e.what()));
  }
}

}  // namespace

// ---- names ----------------------------------------------------------------

std::string_view to_string(ExperimentFamily family) {
  switch (family) {
    case ExperimentFamily::SelfTaught:
      return "self-taught";
    case ExperimentFamily::SelfPaced:
      return "self-paced";
    case ExperimentFamily::Physics:
      return "physics";
  }
  return "?";
}

ExperimentFamily parse_experiment_family(std::string_view name) {
  if (name == "self-taught") return ExperimentFamily::SelfTaught;
  if (name == "self-paced") return ExperimentFamily::SelfPaced;
  if (name == "physics") return ExperimentFamily::Physics;
  throw ConfigError(fmt::format("unknown experiment family '{}'", name));
}

// ---- CutSpec ----------------------------------------------------------------

std::string CutSpec::fixed_name() const {
  if (family == ModelFamily::Cluster) return swept == "j1" ? "j2" : "j1";
  return swept == "ratio" ? "delta" : "ratio";
}

double CutSpec::value(std::size_t i) const {
  if (i + 1 == points) return high;
  return low + (high - low) * static_cast<double>(i) / static_cast<double>(points - 1);
}

Couplings CutSpec::couplings(std::size_t i) const {
  const double v = value(i);
  Couplings c;
  if (family == ModelFamily::Cluster) {
    c.j1 = swept == "j1" ? v : fixed;
    c.j2 = swept == "j1" ? fixed : v;
  } else {
    c.j2 = 1.0;
    c.j1 = swept == "ratio" ? v : fixed;
    c.delta = swept == "ratio" ? fixed : v;
  }
  return c;
}

void CutSpec::validate(const ModelSpec& model) const {
  if (family != model.family) throw ConfigError("cut family differs from the model family");
  const bool known = family == ModelFamily::Cluster ? (swept == "j1" || swept == "j2")
                                                    : (swept == "ratio" || swept == "delta");
  if (!known) {
    throw ConfigError(fmt::format("cannot sweep '{}' in the {} model", swept, to_string(family)));
  }
  if (points < 2) throw ConfigError("a cut needs at least 2 points");
  if (!(low < high)) throw ConfigError("cut range must have low < high");
  const CouplingRange& r = range_of(model, swept);
  const bool open_low = swept == "ratio";
  if ((open_low ? !(low > r.low) : !(low >= r.low)) || high > r.high) {
    throw ConfigError(fmt::format("cut over {} [{}, {}] leaves the model range [{}, {}]", swept,
                                  low, high, r.low, r.high));
  }
  const std::string other = fixed_name();
  const CouplingRange& f = range_of(model, other);
  if (other == "ratio" ? !(fixed > f.low && fixed <= f.high) : !inside(fixed, f)) {
    throw ConfigError(fmt::format("fixed {} = {} outside the model range", other, fixed));
  }
}

// ---- ExperimentConfig -------------------------------------------------------

LossScorer ExperimentConfig::loss_scorer() const {
  return experiment == ExperimentFamily::SelfTaught ? LossScorer::SelfTaught
                                                    : LossScorer::SelfPaced;
}

const PhaseTable& ExperimentConfig::table() const {
  if (phase_table.empty()) return PhaseTable::builtin(model.family);
  if (!loaded_table_) loaded_table_ = PhaseTable::load(phase_table, model.family);
  return *loaded_table_;
}

void ExperimentConfig::validate() const {
  model.validate();
  if (runs == 0) throw ConfigError("runs must be at least 1");
  if (strategies.empty()) throw ConfigError("no strategies requested");
  std::set<StrategyName> seen;
  for (const auto s : strategies) {
    if (!seen.insert(s).second) {
      throw ConfigError(fmt::format("strategy '{}' listed twice", to_string(s)));
    }
    if (!strategy_allowed(experiment, s)) {
      throw ConfigError(fmt::format("strategy '{}' is not part of the {} experiment",
                                    to_string(s), to_string(experiment)));
    }
  }
  if (experiment == ExperimentFamily::Physics && train.variant != QcnnVariant::Matchgate) {
    throw ConfigError("the physics experiment needs the matchgate QCNN variant");
  }
  if (model.n != 8) throw ConfigError("the QCNN is built for 8 qubits");
  if (train_size == 0 || test_size == 0) throw ConfigError("dataset sizes must be positive");
  train.validate();
  for (const double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError(fmt::format("fraction {} outside (0, 1]", f));
  }
  if (estimate.param_samples < 30) throw ConfigError("param_samples must be at least 30");
  if (estimate.bins == 0) throw ConfigError("bins must be positive");
  if (prop2.seeds == 0 || prop2.epochs == 0 || prop2.steps_per_epoch == 0 ||
      prop2.minibatch == 0) {
    throw ConfigError("prop2 seeds, epochs, steps and minibatch must be positive");
  }
  cut.validate(model);
  if (jobs == 0) throw ConfigError("jobs must be at least 1");
}

std::string ExperimentConfig::to_ini() const {
  std::vector<std::string> names;
  for (const auto s : strategies) names.emplace_back(to_string(s));
  const PacingFn pacing = train.pacing.value_or(PacingFn{});
  std::string out;
  out += "[experiment]\n";
  out += fmt::format("family = {}\n", to_string(experiment));
  out += fmt::format("strategies = {}\n", join(names));
  out += fmt::format("runs = {}\n", runs);
  out += fmt::format("seed = {}\n", seed);
  out += "\n[model]\n";
  out += fmt::format("family = {}\n", to_string(model.family));
  out += fmt::format("n = {}\n", model.n);
  out += fmt::format("periodic = {}\n", model.periodic);
  out += fmt::format("j1_low = {}\nj1_high = {}\n", model.j1.low, model.j1.high);
  out += fmt::format("j2_low = {}\nj2_high = {}\n", model.j2.low, model.j2.high);
  out += fmt::format("ratio_low = {}\nratio_high = {}\n", model.ratio.low, model.ratio.high);
  out += fmt::format("delta_low = {}\ndelta_high = {}\n", model.delta.low, model.delta.high);
  out += fmt::format("phase_table = {}\n", phase_table);
  out += "\n[data]\n";
  out += fmt::format("train_size = {}\n", train_size);
  out += fmt::format("test_size = {}\n", test_size);
  out += fmt::format("balanced = {}\n", balanced);
  out += fmt::format("train_per_run = {}\n", train_per_run);
  out += "\n[train]\n";
  out += fmt::format("variant = {}\n", to_string(train.variant));
  out += fmt::format("epochs = {}\n", train.epochs);
  out += fmt::format("steps_per_epoch = {}\n", train.steps_per_epoch);
  out += fmt::format("minibatch = {}\n", train.minibatch);
  out += fmt::format("learning_rate = {}\n", train.adam.learning_rate);
  out += fmt::format("beta1 = {}\nbeta2 = {}\nepsilon = {}\n", train.adam.beta1,
                     train.adam.beta2, train.adam.epsilon);
  out += fmt::format("pacing = {}\n", train.pacing ? to_string(pacing.kind) : "preset");
  out += fmt::format("pacing_start = {}\n", pacing.start_fraction);
  out += fmt::format("pacing_saturation = {}\n", pacing.saturation_epoch);
  out += fmt::format("pacing_fraction = {}\n", pacing.fraction);
  out += fmt::format("reference = {}\n", train.reference_best_epoch ? "best-train" : "final");
  out += "\n[props]\n";
  out += fmt::format("fractions = {}\n", format_doubles(fractions));
  out += fmt::format("param_samples = {}\n", estimate.param_samples);
  out += fmt::format("bins = {}\n", estimate.bins);
  out += fmt::format("min_samples = {}\n", estimate.min_samples);
  out += fmt::format("prop2_seeds = {}\n", prop2.seeds);
  out += fmt::format("prop2_epochs = {}\n", prop2.epochs);
  out += fmt::format("prop2_steps = {}\n", prop2.steps_per_epoch);
  out += fmt::format("prop2_minibatch = {}\n", prop2.minibatch);
  out += "\n[scan]\n";
  out += fmt::format("params = {}\n", scan_params);
  out += fmt::format("swept = {}\n", cut.swept);
  out += fmt::format("fixed = {}\n", cut.fixed);
  out += fmt::format("low = {}\nhigh = {}\n", cut.low, cut.high);
  out += fmt::format("points = {}\n", cut.points);
  out += "\n[output]\n";
  out += fmt::format("out = {}\n", out_dir.string());
  out += fmt::format("cache = {}\n", cache_dir.string());
  out += fmt::format("jobs = {}\n", jobs);
  return out;
}

std::string ExperimentConfig::hash() const {
  const std::string text = to_ini();
  return hex64(fnv1a64(text.substr(0, text.find("\n[output]"))));
}

ExperimentConfig parse_config(std::string_view text) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  const std::map<std::string, std::set<std::string>> schema{
      {"experiment", {"family", "strategies", "runs", "seed"}},
      {"model",
       {"family", "n", "periodic", "j1_low", "j1_high", "j2_low", "j2_high", "ratio_low",
        "ratio_high", "delta_low", "delta_high", "phase_table"}},
      {"data", {"train_size", "test_size", "balanced", "train_per_run"}},
      {"train",
       {"variant", "epochs", "steps_per_epoch", "minibatch", "learning_rate", "beta1", "beta2",
        "epsilon", "pacing", "pacing_start", "pacing_saturation", "pacing_fraction",
        "reference"}},
      {"props",
       {"fractions", "param_samples", "bins", "min_samples", "prop2_seeds", "prop2_epochs",
        "prop2_steps", "prop2_minibatch"}},
      {"scan", {"params", "swept", "fixed", "low", "high", "points"}},
      {"output", {"out", "cache", "jobs"}},
  };
  for (const auto& [name, child] : tree) {
    if (child.empty()) throw ConfigError(fmt::format("key '{}' outside any section", name));
    if (!schema.contains(name)) throw ConfigError(fmt::format("unknown section [{}]", name));
  }
  auto section = [&](const std::string& name) {
    const auto child = tree.get_child_optional(name);
    return Section(child ? &*child : nullptr, name, schema.at(name));
  };

  ExperimentConfig c;
  const Section experiment = section("experiment");
  const Section model = section("model");
  const Section data = section("data");
  const Section train = section("train");
  const Section props = section("props");
  const Section scan = section("scan");
  const Section output = section("output");

  if (auto v = experiment.raw("family")) c.experiment = parse_experiment_family(*v);
  c.strategies = default_strategies(c.experiment);
  if (auto v = experiment.raw("strategies")) {
    c.strategies.clear();
    for (const auto& name : to_list(*v)) c.strategies.push_back(parse_strategy(name));
  }
  experiment.get("runs", c.runs);
  experiment.get_u64("seed", c.seed);

  if (auto v = model.raw("family")) {
    const ModelFamily family = parse_model_family(*v);
    c.model = family == ModelFamily::Cluster ? ModelSpec::cluster() : ModelSpec::xxz();
  }
  c.cut = default_cut(c.model.family);
  model.get("n", c.model.n);
  model.get("periodic", c.model.periodic);
  model.get("j1_low", c.model.j1.low);
  model.get("j1_high", c.model.j1.high);
  model.get("j2_low", c.model.j2.low);
  model.get("j2_high", c.model.j2.high);
  model.get("ratio_low", c.model.ratio.low);
  model.get("ratio_high", c.model.ratio.high);
  model.get("delta_low", c.model.delta.low);
  model.get("delta_high", c.model.delta.high);
  model.get("phase_table", c.phase_table);

  data.get("train_size", c.train_size);
  data.get("test_size", c.test_size);
  data.get("balanced", c.balanced);
  data.get("train_per_run", c.train_per_run);

  if (c.experiment == ExperimentFamily::Physics) c.train.variant = QcnnVariant::Matchgate;
  if (auto v = train.raw("variant")) c.train.variant = parse_qcnn_variant(*v);
  train.get("epochs", c.train.epochs);
  train.get("steps_per_epoch", c.train.steps_per_epoch);
  train.get("minibatch", c.train.minibatch);
  train.get("learning_rate", c.train.adam.learning_rate);
  train.get("beta1", c.train.adam.beta1);
  train.get("beta2", c.train.adam.beta2);
  train.get("epsilon", c.train.adam.epsilon);
  std::string pacing = "preset";
  train.get("pacing", pacing);
  if (pacing != "preset") {
    PacingFn fn;
    fn.kind = parse_pacing_kind(pacing);
    train.get("pacing_start", fn.start_fraction);
    train.get("pacing_saturation", fn.saturation_epoch);
    train.get("pacing_fraction", fn.fraction);
    c.train.pacing = fn;
  }
  if (auto v = train.raw("reference")) {
    if (*v != "final" && *v != "best-train") {
      throw ConfigError(fmt::format("[train] reference: expected final or best-train, got '{}'", *v));
    }
    c.train.reference_best_epoch = *v == "best-train";
  }

  if (auto v = props.raw("fractions")) {
    c.fractions.clear();
    for (const auto& f : to_list(*v)) c.fractions.push_back(to_double(f, "props", "fractions"));
  }
  props.get("param_samples", c.estimate.param_samples);
  props.get("bins", c.estimate.bins);
  props.get("min_samples", c.estimate.min_samples);
  props.get("prop2_seeds", c.prop2.seeds);
  props.get("prop2_epochs", c.prop2.epochs);
  props.get("prop2_steps", c.prop2.steps_per_epoch);
  props.get("prop2_minibatch", c.prop2.minibatch);

  scan.get("params", c.scan_params);
  scan.get("swept", c.cut.swept);
  scan.get("fixed", c.cut.fixed);
  scan.get("low", c.cut.low);
  scan.get("high", c.cut.high);
  scan.get("points", c.cut.points);

  output.get("out", c.out_dir);
  output.get("cache", c.cache_dir);
  output.get("jobs", c.jobs);

  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  return parse_config(read_file(path));
}

void apply(ExperimentConfig& config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.jobs) config.jobs = *o.jobs;
  if (o.out_dir) config.out_dir = *o.out_dir;
  if (o.cache_dir) config.cache_dir = *o.cache_dir;
  if (o.test_size) config.test_size = *o.test_size;
  if (o.params) config.scan_params = *o.params;
  config.validate();
}

// ---- RunLog -----------------------------------------------------------------

namespace {
std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RunLog::RunLog(fs::path path, bool echo) : path_(std::move(path)), echo_(echo) {}

void RunLog::info(std::string_view message) {
  const std::string line = fmt::format("{} {}", timestamp(), message);
  std::lock_guard lock(log_mutex());
  lines_.push_back(line);
  if (echo_) std::cerr << line << '\n';
  if (!path_.empty()) {
    fs::create_directories(path_.parent_path().empty() ? "." : path_.parent_path());
    std::ofstream out(path_, std::ios::app);
    out << line << '\n';
  }
}

// ---- seeds --------------------------------------------------------------------

std::uint64_t train_data_seed(const ExperimentConfig& config, std::size_t run) {
  return derive_seed(config.seed, kTrainDataStream, config.train_per_run ? run : 0);
}

std::uint64_t test_data_seed(const ExperimentConfig& config) {
  return derive_seed(config.seed, kTestDataStream);
}

std::uint64_t run_seed(const ExperimentConfig& config, std::size_t run) {
  return derive_seed(config.seed, kRunStream, run);
}

// ---- commands -------------------------------------------------------------------

Datasets cmd_generate(const ExperimentConfig& config, RunLog& log) {
  config.validate();
  Datasets d;
  const std::size_t sets = config.train_per_run ? config.runs : 1;
  for (std::size_t r = 0; r < sets; ++r) {
    d.train.push_back(load_or_generate(config, DatasetRole::Train, config.train_size,
                                       train_data_seed(config, r), log));
  }
  d.test = load_or_generate(config, DatasetRole::Test, config.test_size, test_data_seed(config),
                            log);
  return d;
}

LieBasis cmd_dla(const ExperimentConfig& config, RunLog& log) {
  config.validate();
  const auto generators = matchgate_generators(config.model.n);
  const std::string fp = fingerprint(generators);
  const fs::path path =
      config.cache_dir / "lie" / fmt::format("matchgate-n{}.json", config.model.n);
  LieBasis basis;
  if (fs::exists(path)) {
    basis = load_basis(path.string(), fp);
    log.info(fmt::format("cache hit: {} (dim {})", path.string(), basis.dim()));
  } else {
    basis = lie_closure(generators);
    save_basis(path.string(), basis);
    log.info(fmt::format("closure computed: dim {} -> {}", basis.dim(), path.string()));
  }
  json names = json::array();
  for (const auto& g : generators) {
    for (const auto& term : g.terms()) names.push_back(term.letters());
  }
  const json report{{"format", "qcurriculum-dla-report"},
                    {"version", 1},
                    {"config_hash", config.hash()},
                    {"n", config.model.n},
                    {"generators", names},
                    {"fingerprint", basis.generator_fingerprint},
                    {"dim", basis.dim()},
                    {"orthonormality_residual", orthonormality_residual(basis)}};
  write_file_atomic(config.out_dir / "dla_report.json", report.dump(2) + "\n");
  return basis;
}

const StrategySummary& TrainSummary::row(StrategyName name) const {
  for (const auto& r : rows) {
    if (r.strategy == name) return r;
  }
  throw std::out_of_range(fmt::format("no summary row for '{}'", to_string(name)));
}

TrainSummary cmd_train(const ExperimentConfig& config, RunLog& log) {
  config.validate();
  const std::string hash = config.hash();
  const Datasets data = cmd_generate(config, log);
  std::optional<LieBasis> basis;
  if (config.experiment == ExperimentFamily::Physics) basis = cmd_dla(config, log);

  auto job_config = [&](StrategyName s, std::size_t run) {
    TrainConfig c = config.train;
    c.strategy = s;
    c.loss_scorer = config.loss_scorer();
    c.run_seed = run_seed(config, run);
    return c;
  };

  // Self-taught references are shared by every strategy of a run.
  std::vector<std::vector<double>> references(config.runs);
  const bool need_reference =
      config.loss_scorer() == LossScorer::SelfTaught &&
      std::any_of(config.strategies.begin(), config.strategies.end(), [](StrategyName s) {
        return s == StrategyName::Easy || s == StrategyName::Hard;
      });
  if (need_reference) {
    parallel_for(config.runs, config.jobs, [&](std::size_t r) {
      references[r] = train_reference(job_config(StrategyName::Standard, r), data.train_for(r));
    });
    log.info(fmt::format("trained {} self-taught reference models", config.runs));
  }

  const std::size_t total = config.strategies.size() * config.runs;
  std::vector<RunMetrics> results(total);
  parallel_for(total, config.jobs, [&](std::size_t k) {
    const StrategyName s = config.strategies[k / config.runs];
    const std::size_t r = k % config.runs;
    const TrainConfig c = job_config(s, r);
    TrainInputs inputs;
    inputs.train = &data.train_for(r);
    inputs.test = &data.test;
    inputs.basis = basis ? &*basis : nullptr;
    const bool uses_reference = config.loss_scorer() == LossScorer::SelfTaught &&
                                (s == StrategyName::Easy || s == StrategyName::Hard);
    if (uses_reference) inputs.reference_params = references[r];
    results[k] = train_run(c, inputs);
    if (uses_reference) results[k].reference_seed = reference_seed(c.run_seed);
    const std::string stem = strategy_file_stem(s, r);
    write_file_atomic(config.out_dir / "metrics" / (stem + ".csv"), metrics_csv(results[k], hash));
    write_file_atomic(config.out_dir / "params" / (stem + ".json"),
                      params_json(c.variant, results[k].final_params, hash));
    log.info(fmt::format("{}: best test {:.4f}, best train {:.4f}", stem,
                         results[k].best_test_accuracy, results[k].best_train_accuracy));
  });

  TrainSummary summary;
  summary.config_hash = hash;
  json rows = json::array();
  for (std::size_t i = 0; i < config.strategies.size(); ++i) {
    StrategySummary s;
    s.strategy = config.strategies[i];
    const std::span<const RunMetrics> runs(results.data() + i * config.runs, config.runs);
    s.aggregate = aggregate(runs);
    for (const auto& r : runs) {
      s.best_test.push_back(r.best_test_accuracy);
      s.best_train.push_back(r.best_train_accuracy);
    }
    rows.push_back(aggregate_json(s, config.runs));
    summary.rows.push_back(std::move(s));
  }
  const json doc{{"format", "qcurriculum-summary"},
                 {"version", 1},
                 {"config_hash", hash},
                 {"experiment", to_string(config.experiment)},
                 {"model", to_string(config.model.family)},
                 {"variant", to_string(config.train.variant)},
                 {"train_size", config.train_size},
                 {"test_size", config.test_size},
                 {"runs", config.runs},
                 {"epochs", config.train.epochs},
                 {"rows", rows}};
  write_file_atomic(config.out_dir / "summary.json", doc.dump(2) + "\n");
  write_file_atomic(config.out_dir / "config.ini", config.to_ini());
  log.info("\n" + summary_table(hash, rows));
  return summary;
}

std::vector<ScanRow> scan_cut(const QcnnArchitecture& arch, std::span<const double> theta,
                              const ModelSpec& model, const CutSpec& cut,
                              const PhaseTable& table) {
  cut.validate(model);
  const std::size_t classes = model.num_classes();
  const FusedCircuit circuit(arch, theta);
  std::vector<ScanRow> rows;
  rows.reserve(cut.points);
  for (std::size_t i = 0; i < cut.points; ++i) {
    const auto example = make_example(model, cut.couplings(i), table);
    const auto probs = circuit.forward(example.state).probs;
    ScanRow row;
    row.coupling = cut.value(i);
    row.true_phase = example.phase_index;
    double mass = 0.0;
    for (std::size_t m = 0; m < classes; ++m) mass += probs[m];
    if (!(mass > 0.0)) {
      throw NumericalError(fmt::format("no output mass on class outcomes at {} = {}", cut.swept,
                                       row.coupling));
    }
    for (std::size_t m = 0; m < classes; ++m) row.probs.push_back(probs[m] / mass);
    row.predicted = predict_class(row.probs, classes);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows, std::size_t classes,
                     const std::string& config_hash) {
  std::string out = "coupling,true_phase";
  for (std::size_t m = 0; m < classes; ++m) out += fmt::format(",p_class_{}", m);
  out += ",predicted,config_hash\n";
  for (const auto& r : rows) {
    out += fmt::format("{:.17g},{}", r.coupling, r.true_phase);
    for (const double p : r.probs) out += fmt::format(",{:.17g}", p);
    out += fmt::format(",{},{}\n", r.predicted, config_hash);
  }
  return out;
}

namespace {
template <typename Get>
std::vector<double> transitions(const std::vector<ScanRow>& rows, Get get) {
  std::vector<double> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (get(rows[i]) != get(rows[i - 1])) {
      out.push_back(0.5 * (rows[i].coupling + rows[i - 1].coupling));
    }
  }
  return out;
}
}  // namespace

std::vector<double> predicted_transitions(const std::vector<ScanRow>& rows) {
  return transitions(rows, [](const ScanRow& r) { return r.predicted; });
}

std::vector<double> true_transitions(const std::vector<ScanRow>& rows) {
  return transitions(rows, [](const ScanRow& r) { return r.true_phase; });
}

std::vector<ScanRow> cmd_scan(const ExperimentConfig& config, RunLog& log) {
  config.validate();
  if (config.scan_params.empty()) throw ConfigError("scan needs a parameter file ([scan] params)");
  const auto arch = build_qcnn(config.train.variant);
  const auto theta = load_params(config.scan_params, config.train.variant);
  const auto rows = scan_cut(arch, theta, config.model, config.cut, config.table());
  write_file_atomic(config.out_dir / "scan.csv",
                    scan_csv(rows, config.model.num_classes(), config.hash()));
  log.info(fmt::format("scan over {} points; predicted transitions at [{}], labeled at [{}]",
                       rows.size(), format_doubles(predicted_transitions(rows)),
                       format_doubles(true_transitions(rows))));
  return rows;
}

std::string prop1_report_json(const GradientProfile& profile, const Prop1Report& report,
                              const std::string& config_hash) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"fraction", r.fraction},
                    {"subset_mean", r.subset_mean},
                    {"full_mean", r.full_mean},
                    {"ratio", r.ratio},
                    {"holds", r.holds}});
  }
  std::vector<bool> low(profile.low_confidence.begin(), profile.low_confidence.end());
  const json doc{{"format", "qcurriculum-prop1-report"},
                 {"version", 1},
                 {"config_hash", config_hash},
                 {"hypothesis_non_increasing", report.hypothesis_non_increasing},
                 {"conclusion_all_fractions", report.conclusion_all_fractions},
                 {"empty_bins", report.empty_bins},
                 {"rows", rows},
                 {"profile",
                  {{"param_samples", profile.param_samples},
                   {"min_samples", profile.min_samples},
                   {"bin_edges", profile.bin_edges},
                   {"bin_mean", profile.bin_mean},
                   {"bin_count", profile.bin_count},
                   {"bin_examples", profile.bin_examples},
                   {"low_confidence", low},
                   {"cdf", profile.cdf},
                   {"scores", profile.scores},
                   {"example_mean", profile.example_mean}}}};
  return doc.dump(2) + "\n";
}

std::string prop2_report_json(const Prop2Report& r, const std::string& config_hash) {
  json doc{{"format", "qcurriculum-prop2-report"},
           {"version", 1},
           {"config_hash", config_hash},
           {"surrogate", r.surrogate},
           {"seeds", r.seeds},
           {"epochs", r.epochs},
           {"examples", r.examples},
           {"features", r.features},
           {"learning_rate", r.learning_rate},
           {"risk_curriculum", r.risk_curriculum},
           {"risk_random", r.risk_random},
           {"sigma2_curriculum", r.sigma2_curriculum},
           {"sigma2_curriculum_initial", r.sigma2_curriculum_initial},
           {"sigma2_random", r.sigma2_random},
           {"risk_trace_curriculum", r.risk_trace_curriculum},
           {"risk_trace_random", r.risk_trace_random},
           {"premise_failures", r.premise_failures},
           {"premise_holds", r.premise_holds}};
  if (r.seeds > 1) {
    doc["mean_risk_curriculum"] = r.mean_risk_curriculum;
    doc["mean_risk_random"] = r.mean_risk_random;
    doc["sem_difference"] = r.sem_difference;
    doc["ordering_holds"] = r.ordering_holds;
  } else {
    doc["single_sample"] = true;
  }
  return doc.dump(2) + "\n";
}

PropsResult cmd_verify_props(const ExperimentConfig& config, RunLog& log) {
  config.validate();
  const std::string hash = config.hash();
  const Datasets data = cmd_generate(config, log);
  const LieBasis basis = cmd_dla(config, log);
  const auto& examples = data.train_for(0).examples;
  const std::size_t classes = config.model.num_classes();

  Scorer scorer;
  scorer.kind = ScorerKind::PhysicsPg;
  scorer.direction = PgDirection::LowerFirst;
  ScoreContext context;
  context.basis = &basis;
  context.classes = classes;
  const auto scores = score_all(scorer, examples, context);

  const auto arch = build_qcnn(QcnnVariant::Matchgate);
  EstimateOptions estimate = config.estimate;
  estimate.seed = derive_seed(config.seed, kPropsStream, 1);
  estimate.jobs = config.jobs;
  PropsResult result;
  result.profile = estimate_G(arch, examples, scores, classes, estimate);
  result.prop1 = prop1_check(result.profile, config.fractions);
  write_file_atomic(config.out_dir / "prop1_report.json",
                    prop1_report_json(result.profile, result.prop1, hash));
  log.info(fmt::format("prop1: hypothesis {} conclusion {}",
                       result.prop1.hypothesis_non_increasing ? "holds" : "fails",
                       result.prop1.conclusion_all_fractions ? "holds" : "fails"));

  Prop2Options prop2 = config.prop2;
  prop2.seed = derive_seed(config.seed, kPropsStream, 2);
  result.prop2 = prop2_toy_check(examples, prop2);
  write_file_atomic(config.out_dir / "prop2_report.json", prop2_report_json(result.prop2, hash));
  log.info(fmt::format("prop2: premise {} ({} failing epochs), risk A {:.6g} vs B {:.6g}",
                       result.prop2.premise_holds ? "holds" : "fails",
                       result.prop2.premise_failures.size(), result.prop2.mean_risk_curriculum,
                       result.prop2.mean_risk_random));
  return result;
}

std::string cmd_report(const ExperimentConfig& config, RunLog& log) {
  const fs::path summary_path = config.out_dir / "summary.json";
  const json summary = parse_json_file(summary_path);
  const std::string hash = summary.value("config_hash", "");
  if (hash != config.hash()) {
    throw IoError(fmt::format("{} was written by config {}, not {}", summary_path.string(), hash,
                              config.hash()));
  }
  for (const auto& row : summary.at("rows")) {
    const auto best_train = row.at("best_train").get<std::vector<double>>();
    const auto best_test = row.at("best_test").get<std::vector<double>>();
    const auto files = row.at("metrics").get<std::vector<std::string>>();
    for (std::size_t r = 0; r < files.size(); ++r) {
      std::istringstream in(read_file(config.out_dir / files[r]));
      std::string line;
      std::getline(in, line);
      if (line != kMetricsCsvHeader) throw IoError(files[r] + ": unexpected CSV header");
      double max_train = -1.0;
      double max_test = -1.0;
      while (std::getline(in, line)) {
        std::vector<std::string> cells;
        boost::algorithm::split(cells, line, boost::algorithm::is_any_of(","));
        if (cells.size() != 9) throw IoError(files[r] + ": malformed CSV row");
        if (cells[8] != hash) throw IoError(files[r] + ": config hash differs from the summary");
        max_train = std::max(max_train, std::stod(cells[1]));
        max_test = std::max(max_test, std::stod(cells[2]));
      }
      if (max_train != best_train.at(r) || max_test != best_test.at(r)) {
        throw IoError(fmt::format("{}: column maxima ({}, {}) differ from the summary ({}, {})",
                                  files[r], max_train, max_test, best_train.at(r),
                                  best_test.at(r)));
      }
    }
  }
  log.info("summary and metrics files are consistent");
  return summary_table(hash, summary.at("rows"));
}

int exit_code(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error) != nullptr) return 1;
  if (dynamic_cast<const NumericalError*>(&error) != nullptr) return 2;
  if (dynamic_cast<const IoError*>(&error) != nullptr) return 3;
  if (dynamic_cast<const fs::filesystem_error*>(&error) != nullptr) return 3;
  return 1;
}

std::string params_json(QcnnVariant variant, std::span<const double> theta,
                        const std::string& config_hash) {
  const json doc{{"format", "qcurriculum-params"},
                 {"version", 1},
                 {"config_hash", config_hash},
                 {"variant", to_string(variant)},
                 {"theta", std::vector<double>(theta.begin(), theta.end())}};
  return doc.dump(2) + "\n";
}

std::vector<double> load_params(const fs::path& path, QcnnVariant expected) {
  const json doc = parse_json_file(path);
  if (doc.value("format", "") != "qcurriculum-params") {
    throw IoError(path.string() + ": not a parameter file");
  }
  const QcnnVariant variant = parse_qcnn_variant(doc.at("variant").get<std::string>());
  if (variant != expected) {
    throw ConfigError(fmt::format("{} holds {} parameters, config asks for {}", path.string(),
                                  to_string(variant), to_string(expected)));
  }
  auto theta = doc.at("theta").get<std::vector<double>>();
  if (theta.size() != build_qcnn(expected).total_params) {
    throw IoError(fmt::format("{}: {} parameters, expected {}", path.string(), theta.size(),
                              build_qcnn(expected).total_params));
  }
  return theta;
}

}  // namespace qcurriculum
