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

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qcurriculum/random.hpp"
#include "qcurriculum/state_vector.hpp"

namespace testing_support {

/// Gaussian amplitudes via Box-Muller, normalized.
inline qcurriculum::StateVector random_state(std::size_t n, qcurriculum::Rng& rng) {
  std::vector<qcurriculum::Complex> amps(std::size_t{1} << n);
  for (auto& a : amps) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    a = {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
  }
  return qcurriculum::StateVector::normalized(n, std::move(amps));
}

inline qcurriculum::PauliTerm random_term(std::size_t n, qcurriculum::Rng& rng) {
  const std::uint64_t mask = (n == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  return qcurriculum::PauliTerm::from_masks(n, rng.next() & mask, rng.next() & mask);
}

}  // namespace testing_support
