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
#include <filesystem>
#include <string>

#include "qcurriculum/spin_models.hpp"

namespace qcurriculum {

/// On-disk dataset layout, version 1.
///
/// `<stem>.bin`  : 8-byte magic "QCURDS01", then little-endian u32 format
///                 version, u32 qubit count, u64 example count, followed by
///                 count * 2^n amplitudes as (f64 real, f64 imag) pairs.
/// `<stem>.json` : manifest with the model spec, seed, role, per-example
///                 couplings / labels / energies / gaps / degeneracy flags,
///                 class counts, the FNV-1a hash of the binary file and an
///                 optional config hash.
inline constexpr std::uint32_t kDatasetFormatVersion = 1;

void save_dataset(const Dataset& dataset, const std::filesystem::path& stem,
                  const std::string& config_hash = {});

/// Throws IoError on missing files, magic/version mismatch, or a binary
/// whose hash disagrees with the manifest.
Dataset load_dataset(const std::filesystem::path& stem);

bool dataset_exists(const std::filesystem::path& stem);

}  // namespace qcurriculum
