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

#include "qcurriculum/dataset_io.hpp"

#include <bit>
#include <cstring>

#include <nlohmann/json.hpp>

#include "qcurriculum/errors.hpp"
#include "qcurriculum/file_io.hpp"
#include "qcurriculum/hash.hpp"

namespace qcurriculum {

static_assert(std::endian::native == std::endian::little,
              "dataset binaries are written in host order and assume little-endian");

namespace {

constexpr char kMagic[8] = {'Q', 'C', 'U', 'R', 'D', 'S', '0', '1'};

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  auto p = stem;
  p += suffix;
  return p;
}

template <typename T>
void put(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T take(std::string_view bytes, std::size_t& offset) {
  if (offset + sizeof(T) > bytes.size()) throw IoError("dataset binary is truncated");
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

nlohmann::json range_json(const CouplingRange& r) { return {r.low, r.high}; }

CouplingRange range_from(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::filesystem::path& stem,
                  const std::string& config_hash) {
  const std::size_t n = dataset.model.n;
  std::string binary(kMagic, sizeof(kMagic));
  put<std::uint32_t>(binary, kDatasetFormatVersion);
  put<std::uint32_t>(binary, static_cast<std::uint32_t>(n));
  put<std::uint64_t>(binary, dataset.size());
  for (const auto& e : dataset.examples) {
    if (e.state.num_qubits() != n) throw std::invalid_argument("example size differs from model");
    for (const auto& a : e.state.amplitudes()) {
      put<double>(binary, a.real());
      put<double>(binary, a.imag());
    }
  }

  nlohmann::json manifest;
  manifest["format"] = "qcurriculum-dataset";
  manifest["version"] = kDatasetFormatVersion;
  manifest["model"] = {{"family", to_string(dataset.model.family)},
                       {"n", n},
                       {"periodic", dataset.model.periodic},
                       {"j1", range_json(dataset.model.j1)},
                       {"j2", range_json(dataset.model.j2)},
                       {"ratio", range_json(dataset.model.ratio)},
                       {"delta", range_json(dataset.model.delta)}};
  manifest["seed"] = dataset.seed;
  manifest["role"] = to_string(dataset.role);
  manifest["balanced"] = dataset.balanced;
  manifest["count"] = dataset.size();
  manifest["class_counts"] = dataset.class_counts();
  manifest["binary"] = with_suffix(stem, ".bin").filename().string();
  manifest["binary_fnv1a64"] = hex64(fnv1a64(binary));
  if (!config_hash.empty()) manifest["config_hash"] = config_hash;
  auto& examples = manifest["examples"] = nlohmann::json::array();
  for (const auto& e : dataset.examples) {
    examples.push_back({{"j1", e.couplings.j1},
                        {"j2", e.couplings.j2},
                        {"delta", e.couplings.delta},
                        {"phase", e.phase_index},
                        {"energy", e.energy},
                        {"gap", e.gap},
                        {"degenerate", e.degenerate}});
  }

  write_file_atomic(with_suffix(stem, ".bin"), binary);
  write_file_atomic(with_suffix(stem, ".json"), manifest.dump(2) + "\n");
}

bool dataset_exists(const std::filesystem::path& stem) {
  return std::filesystem::exists(with_suffix(stem, ".bin")) &&
         std::filesystem::exists(with_suffix(stem, ".json"));
}

Dataset load_dataset(const std::filesystem::path& stem) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(with_suffix(stem, ".json")));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("dataset manifest is not valid JSON: " + std::string(e.what()));
  }
  const std::string binary = read_file(with_suffix(stem, ".bin"));

  try {
    if (manifest.at("format") != "qcurriculum-dataset" ||
        manifest.at("version") != kDatasetFormatVersion) {
      throw IoError("unsupported dataset manifest format");
    }
    if (manifest.at("binary_fnv1a64").get<std::string>() != hex64(fnv1a64(binary))) {
      throw IoError("dataset binary does not match its manifest hash");
    }
    if (binary.size() < sizeof(kMagic) || std::memcmp(binary.data(), kMagic, sizeof(kMagic)) != 0) {
      throw IoError("dataset binary has the wrong magic");
    }
    std::size_t offset = sizeof(kMagic);
    if (take<std::uint32_t>(binary, offset) != kDatasetFormatVersion) {
      throw IoError("unsupported dataset binary version");
    }
    const std::size_t n = take<std::uint32_t>(binary, offset);
    const std::size_t count = take<std::uint64_t>(binary, offset);

    Dataset dataset;
    const auto& m = manifest.at("model");
    dataset.model.family = parse_model_family(m.at("family").get<std::string>());
    dataset.model.n = m.at("n").get<std::size_t>();
    dataset.model.periodic = m.at("periodic").get<bool>();
    dataset.model.j1 = range_from(m.at("j1"));
    dataset.model.j2 = range_from(m.at("j2"));
    dataset.model.ratio = range_from(m.at("ratio"));
    dataset.model.delta = range_from(m.at("delta"));
    dataset.seed = manifest.at("seed").get<std::uint64_t>();
    dataset.role = parse_dataset_role(manifest.at("role").get<std::string>());
    dataset.balanced = manifest.at("balanced").get<bool>();
    const auto& records = manifest.at("examples");
    if (dataset.model.n != n || records.size() != count) {
      throw IoError("dataset manifest and binary disagree on shape");
    }

    const std::size_t dim = std::size_t{1} << n;
    dataset.examples.reserve(count);
    for (const auto& r : records) {
      std::vector<Complex> amplitudes(dim);
      for (auto& a : amplitudes) {
        const double re = take<double>(binary, offset);
        const double im = take<double>(binary, offset);
        a = {re, im};
      }
      LabeledExample e;
      e.state = StateVector(n, std::move(amplitudes));
      e.couplings = {r.at("j1").get<double>(), r.at("j2").get<double>(),
                     r.at("delta").get<double>()};
      e.phase_index = r.at("phase").get<int>();
      e.label = one_hot(e.phase_index, dataset.model.num_classes());
      e.energy = r.at("energy").get<double>();
      e.gap = r.at("gap").get<double>();
      e.degenerate = r.at("degenerate").get<bool>();
      dataset.examples.push_back(std::move(e));
    }
    if (offset != binary.size()) throw IoError("dataset binary has trailing bytes");
    return dataset;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed dataset manifest: " + std::string(e.what()));
  } catch (const ConfigError& e) {
    throw IoError("malformed dataset manifest: " + std::string(e.what()));
  }
}

}  // namespace qcurriculum
