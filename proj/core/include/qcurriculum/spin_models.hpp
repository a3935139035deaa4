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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcurriculum/pauli.hpp"
#include "qcurriculum/state_vector.hpp"

namespace qcurriculum {

enum class ModelFamily { Cluster, Xxz };

std::string_view to_string(ModelFamily family);
ModelFamily parse_model_family(std::string_view name);

/// Closed sampling interval; low == high denotes a fixed coupling.
struct CouplingRange {
  double low = 0.0;
  double high = 0.0;
  bool fixed() const { return low == high; }
};

/// Coupling record of one Hamiltonian instance. For the XXZ family j2 is
/// held at 1 and j1 carries the ratio j1/j2.
struct Couplings {
  double j1 = 0.0;
  double j2 = 0.0;
  double delta = 0.0;
};

struct ModelSpec {
  ModelFamily family = ModelFamily::Cluster;
  std::size_t n = 8;
  /// Cluster only: periodic (indices mod n) or open chain.
  bool periodic = true;
  CouplingRange j1{-4.0, 4.0};
  CouplingRange j2{-4.0, 4.0};
  /// XXZ only: j1/j2 sampled on (low, high], j2 fixed at 1.
  CouplingRange ratio{0.0, 3.0};
  CouplingRange delta{3.0, 3.0};

  static ModelSpec cluster(std::size_t n = 8);
  static ModelSpec xxz(std::size_t n = 8);

  std::size_t num_classes() const { return family == ModelFamily::Cluster ? 4 : 3; }
  /// Throws ConfigError for odd XXZ sizes, n < 3, or degenerate ranges.
  void validate() const;
};

/// H = sum_j (Z_j - j1 X_j X_{j+1} - j2 X_{j-1} Z_j X_{j+1}). Periodic
/// indices wrap mod n; open chains drop terms that leave the register.
OperatorSum build_cluster(std::size_t n, double j1, double j2, bool periodic = true);

/// Bond-alternating XXZ chain with open boundaries: j1 on bonds
/// (2j, 2j+1), j2 on bonds (2j+1, 2j+2) in 0-based qubit labels, each bond
/// carrying XX + YY + delta ZZ.
OperatorSum build_xxz(std::size_t n, double j1, double j2, double delta);

OperatorSum build_hamiltonian(const ModelSpec& spec, const Couplings& couplings);

/// a * u + b * v + c >= 0.
struct HalfPlane {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

struct PhaseRegion {
  int phase = 0;
  std::vector<HalfPlane> constraints;
};

/// Piecewise-linear phase diagram over two coordinates (j1, j2 for the
/// cluster family; j1/j2 and delta for XXZ). Regions are closed; a point on
/// a shared boundary takes the lowest matching phase index.
class PhaseTable {
 public:
  PhaseTable(std::vector<std::string> phase_names, std::vector<PhaseRegion> regions);

  /// Parses one family's entry from a boundary-table document.
  static PhaseTable parse(std::string_view json_text, ModelFamily family);
  static PhaseTable load(const std::string& path, ModelFamily family);
  /// Tables compiled in from data/phase_boundaries.json.
  static const PhaseTable& builtin(ModelFamily family);

  int classify(double u, double v) const;
  std::size_t num_phases() const { return names_.size(); }
  const std::vector<std::string>& phase_names() const { return names_; }
  const std::vector<PhaseRegion>& regions() const { return regions_; }

 private:
  std::vector<std::string> names_;
  std::vector<PhaseRegion> regions_;
};

namespace cluster_phase {
inline constexpr int kSpt = 0;
inline constexpr int kFerromagnetic = 1;
inline constexpr int kAntiferromagnetic = 2;
inline constexpr int kTrivial = 3;
}  // namespace cluster_phase

namespace xxz_phase {
inline constexpr int kTrivial = 0;
inline constexpr int kAntiferromagnetic = 1;
inline constexpr int kTopological = 2;
}  // namespace xxz_phase

int label_cluster(double j1, double j2,
                  const PhaseTable& table = PhaseTable::builtin(ModelFamily::Cluster));
/// Throws std::invalid_argument for ratio <= 0.
int label_xxz(double ratio, double delta,
              const PhaseTable& table = PhaseTable::builtin(ModelFamily::Xxz));
int label(const ModelSpec& spec, const Couplings& couplings, const PhaseTable& table);

struct LabeledExample {
  StateVector state;
  std::vector<double> label;  // one-hot, length M
  Couplings couplings;
  int phase_index = 0;
  std::optional<double> score;
  bool degenerate = false;
  double energy = 0.0;
  double gap = 0.0;
};

std::vector<double> one_hot(int index, std::size_t classes);

enum class DatasetRole { Train, Test };
std::string_view to_string(DatasetRole role);
DatasetRole parse_dataset_role(std::string_view name);

struct Dataset {
  std::vector<LabeledExample> examples;
  ModelSpec model;
  std::uint64_t seed = 0;
  DatasetRole role = DatasetRole::Train;
  bool balanced = true;

  std::size_t size() const { return examples.size(); }
  std::vector<std::size_t> class_counts() const;
};

struct GenerateOptions {
  bool balanced = true;
  /// Rejection draws allowed per example before the quota is declared
  /// unreachable.
  std::size_t resample_cap = 100000;
  /// Worker threads for the diagonalizations; output is independent of it.
  std::size_t jobs = 1;
};

/// Samples couplings uniformly from the model's ranges and labels the exact
/// ground state of each instance. Each example draws from its own random
/// sub-stream, so the result depends only on (spec, count, seed, table).
/// Balanced generation assigns class quotas ceil/floor(count / M).
Dataset generate_dataset(const ModelSpec& spec, std::size_t count, std::uint64_t seed,
                         DatasetRole role, const GenerateOptions& options = {},
                         const PhaseTable* table = nullptr);

/// Builds one labeled example from explicit couplings.
LabeledExample make_example(const ModelSpec& spec, const Couplings& couplings,
                            const PhaseTable& table);

}  // namespace qcurriculum
