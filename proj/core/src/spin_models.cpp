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

#include "qcurriculum/spin_models.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qcurriculum/builtin_phase_table.hpp"
#include "qcurriculum/dense.hpp"
#include "qcurriculum/errors.hpp"
#include "qcurriculum/parallel.hpp"
#include "qcurriculum/random.hpp"

namespace qcurriculum {

namespace {

constexpr std::uint64_t kSampleStream = 0x73616d706c65ULL;  // "sample"
constexpr std::uint64_t kOrderStream = 0x6f72646572ULL;     // "order"

void check_range(const CouplingRange& range, const char* name, bool allow_fixed) {
  if (!(range.low <= range.high) || (!allow_fixed && range.fixed())) {
    throw ConfigError(std::string("coupling range for ") + name + " must satisfy low < high");
  }
}

double draw(Rng& rng, const CouplingRange& range) {
  return range.fixed() ? range.low : rng.uniform(range.low, range.high);
}

}  // namespace

std::string_view to_string(ModelFamily family) {
  return family == ModelFamily::Cluster ? "cluster" : "xxz";
}

ModelFamily parse_model_family(std::string_view name) {
  if (name == "cluster") return ModelFamily::Cluster;
  if (name == "xxz") return ModelFamily::Xxz;
  throw ConfigError("unknown model family '" + std::string(name) + "'");
}

ModelSpec ModelSpec::cluster(std::size_t n) {
  ModelSpec spec;
  spec.family = ModelFamily::Cluster;
  spec.n = n;
  return spec;
}

ModelSpec ModelSpec::xxz(std::size_t n) {
  ModelSpec spec;
  spec.family = ModelFamily::Xxz;
  spec.n = n;
  return spec;
}

void ModelSpec::validate() const {
  if (family == ModelFamily::Cluster) {
    if (n < 3) throw ConfigError("cluster model needs n >= 3");
    check_range(j1, "j1", true);
    check_range(j2, "j2", true);
    if (j1.fixed() && j2.fixed()) throw ConfigError("cluster model has no sampled coupling");
  } else {
    if (n < 4 || n % 2 != 0) throw ConfigError("XXZ model needs an even n >= 4");
    check_range(ratio, "ratio", false);
    if (ratio.low < 0.0) throw ConfigError("XXZ ratio range must be positive");
    check_range(delta, "delta", true);
  }
}

OperatorSum build_cluster(std::size_t n, double j1, double j2, bool periodic) {
  if (n < 3) throw std::invalid_argument("cluster model needs n >= 3");
  OperatorSum h(n);
  auto site = [&](long j) -> std::optional<std::size_t> {
    if (j >= 0 && j < static_cast<long>(n)) return static_cast<std::size_t>(j);
    if (!periodic) return std::nullopt;
    return static_cast<std::size_t>((j % static_cast<long>(n) + static_cast<long>(n)) %
                                    static_cast<long>(n));
  };
  for (long j = 0; j < static_cast<long>(n); ++j) {
    h.add(PauliTerm::on(n, {{static_cast<std::size_t>(j), Pauli::Z}}));
    const auto right = site(j + 1);
    const auto left = site(j - 1);
    if (j1 != 0.0 && right) {
      h.add(PauliTerm::on(n, {{static_cast<std::size_t>(j), Pauli::X}, {*right, Pauli::X}}, -j1));
    }
    if (j2 != 0.0 && left && right) {
      h.add(PauliTerm::on(
          n, {{*left, Pauli::X}, {static_cast<std::size_t>(j), Pauli::Z}, {*right, Pauli::X}},
          -j2));
    }
  }
  return h;
}

OperatorSum build_xxz(std::size_t n, double j1, double j2, double delta) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("XXZ model needs an even n >= 4");
  OperatorSum h(n);
  auto bond = [&](std::size_t a, std::size_t b, double coupling) {
    if (coupling == 0.0) return;
    h.add(PauliTerm::on(n, {{a, Pauli::X}, {b, Pauli::X}}, coupling));
    h.add(PauliTerm::on(n, {{a, Pauli::Y}, {b, Pauli::Y}}, coupling));
    if (delta != 0.0) h.add(PauliTerm::on(n, {{a, Pauli::Z}, {b, Pauli::Z}}, coupling * delta));
  };
  for (std::size_t a = 0; a + 1 < n; a += 2) bond(a, a + 1, j1);
  for (std::size_t a = 1; a + 2 < n; a += 2) bond(a, a + 1, j2);
  return h;
}

OperatorSum build_hamiltonian(const ModelSpec& spec, const Couplings& couplings) {
  if (spec.family == ModelFamily::Cluster) {
    return build_cluster(spec.n, couplings.j1, couplings.j2, spec.periodic);
  }
  return build_xxz(spec.n, couplings.j1, couplings.j2, couplings.delta);
}

PhaseTable::PhaseTable(std::vector<std::string> phase_names, std::vector<PhaseRegion> regions)
    : names_(std::move(phase_names)), regions_(std::move(regions)) {
  if (names_.empty() || regions_.empty()) throw ConfigError("phase table has no phases");
  for (const auto& region : regions_) {
    if (region.phase < 0 || static_cast<std::size_t>(region.phase) >= names_.size()) {
      throw ConfigError("phase table region refers to unknown phase " +
                        std::to_string(region.phase));
    }
  }
}

PhaseTable PhaseTable::parse(std::string_view json_text, ModelFamily family) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("phase table is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != "qcurriculum-phase-table" || doc.at("version") != 1) {
      throw ConfigError("unsupported phase table format or version");
    }
    const auto& entry = doc.at("families").at(std::string(to_string(family)));
    auto names = entry.at("phases").get<std::vector<std::string>>();
    std::vector<PhaseRegion> regions;
    for (const auto& r : entry.at("regions")) {
      PhaseRegion region;
      region.phase = r.at("phase").get<int>();
      for (const auto& h : r.at("half_planes")) {
        if (h.size() != 3) throw ConfigError("half-plane needs three coefficients");
        region.constraints.push_back({h[0].get<double>(), h[1].get<double>(), h[2].get<double>()});
      }
      regions.push_back(std::move(region));
    }
    return PhaseTable(std::move(names), std::move(regions));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed phase table: ") + e.what());
  }
}

PhaseTable PhaseTable::load(const std::string& path, ModelFamily family) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open phase table " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), family);
}

const PhaseTable& PhaseTable::builtin(ModelFamily family) {
  static const PhaseTable cluster = parse(detail::kBuiltinPhaseTable, ModelFamily::Cluster);
  static const PhaseTable xxz = parse(detail::kBuiltinPhaseTable, ModelFamily::Xxz);
  return family == ModelFamily::Cluster ? cluster : xxz;
}

int PhaseTable::classify(double u, double v) const {
  int best = std::numeric_limits<int>::max();
  for (const auto& region : regions_) {
    bool inside = true;
    for (const auto& h : region.constraints) {
      if (!(h.a * u + h.b * v + h.c >= 0.0)) {
        inside = false;
        break;
      }
    }
    if (inside) best = std::min(best, region.phase);
  }
  if (best == std::numeric_limits<int>::max()) {
    throw std::logic_error("phase table does not cover (" + std::to_string(u) + ", " +
                           std::to_string(v) + ")");
  }
  return best;
}

int label_cluster(double j1, double j2, const PhaseTable& table) {
  return table.classify(j1, j2);
}

int label_xxz(double ratio, double delta, const PhaseTable& table) {
  if (!(ratio > 0.0)) throw std::invalid_argument("XXZ coupling ratio must be positive");
  return table.classify(ratio, delta);
}

int label(const ModelSpec& spec, const Couplings& couplings, const PhaseTable& table) {
  if (spec.family == ModelFamily::Cluster) return label_cluster(couplings.j1, couplings.j2, table);
  return label_xxz(couplings.j1 / couplings.j2, couplings.delta, table);
}

std::vector<double> one_hot(int index, std::size_t classes) {
  if (index < 0 || static_cast<std::size_t>(index) >= classes) {
    throw std::out_of_range("class index out of range");
  }
  std::vector<double> v(classes, 0.0);
  v[static_cast<std::size_t>(index)] = 1.0;
  return v;
}

std::string_view to_string(DatasetRole role) { return role == DatasetRole::Train ? "train" : "test"; }

DatasetRole parse_dataset_role(std::string_view name) {
  if (name == "train") return DatasetRole::Train;
  if (name == "test") return DatasetRole::Test;
  throw ConfigError("unknown dataset role '" + std::string(name) + "'");
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(model.num_classes(), 0);
  for (const auto& e : examples) ++counts.at(static_cast<std::size_t>(e.phase_index));
  return counts;
}

LabeledExample make_example(const ModelSpec& spec, const Couplings& couplings,
                            const PhaseTable& table) {
  LabeledExample example;
  example.couplings = couplings;
  example.phase_index = label(spec, couplings, table);
  example.label = one_hot(example.phase_index, spec.num_classes());
  auto gs = ground_state(build_hamiltonian(spec, couplings));
  example.energy = gs.energy;
  example.gap = gs.gap;
  example.degenerate = gs.degenerate;
  example.state = std::move(gs.state);
  return example;
}

Dataset generate_dataset(const ModelSpec& spec, std::size_t count, std::uint64_t seed,
                         DatasetRole role, const GenerateOptions& options,
                         const PhaseTable* table) {
  spec.validate();
  const PhaseTable& phases = table ? *table : PhaseTable::builtin(spec.family);
  const std::size_t classes = spec.num_classes();
  if (phases.num_phases() != classes) {
    throw ConfigError("phase table lists " + std::to_string(phases.num_phases()) +
                      " phases, model has " + std::to_string(classes));
  }
  if (options.balanced && count < classes) {
    throw ConfigError("balanced generation needs at least one example per class");
  }

  auto sample = [&](Rng& rng) {
    Couplings c;
    if (spec.family == ModelFamily::Cluster) {
      c.j1 = draw(rng, spec.j1);
      c.j2 = draw(rng, spec.j2);
    } else {
      // (low, high]: mirror the half-open uniform draw.
      c.j1 = spec.ratio.high - (spec.ratio.high - spec.ratio.low) * rng.uniform();
      c.j2 = 1.0;
      c.delta = draw(rng, spec.delta);
    }
    return c;
  };

  std::vector<Couplings> couplings(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, kSampleStream, i));
    if (!options.balanced) {
      couplings[i] = sample(rng);
      continue;
    }
    const int target = static_cast<int>(i % classes);
    std::size_t attempts = 0;
    Couplings c = sample(rng);
    while (label(spec, c, phases) != target) {
      if (++attempts >= options.resample_cap) {
        throw NumericalError("class '" + phases.phase_names()[target] +
                             "' not reached within the resample cap; check the coupling ranges");
      }
      c = sample(rng);
    }
    couplings[i] = c;
  }
  if (options.balanced) {
    Rng order(derive_seed(seed, kOrderStream));
    order.shuffle(std::span<Couplings>(couplings));
  }

  Dataset dataset;
  dataset.model = spec;
  dataset.seed = seed;
  dataset.role = role;
  dataset.balanced = options.balanced;
  dataset.examples.resize(count);
  parallel_for(count, options.jobs, [&](std::size_t i) {
    dataset.examples[i] = make_example(spec, couplings[i], phases);
  });
  return dataset;
}

}  // namespace qcurriculum
