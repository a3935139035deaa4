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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qcurriculum {

using Complex = std::complex<double>;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Largest register a bit-packed Pauli string can address.
inline constexpr std::size_t kMaxPauliQubits = 64;

/// Amplitude-index bit that belongs to `qubit` in an `n`-qubit register.
/// Qubit 0 is the most significant bit.
constexpr std::uint64_t qubit_bit(std::size_t n, std::size_t qubit) {
  return std::uint64_t{1} << (n - 1 - qubit);
}

/// A scaled Pauli string c * P_0 (x) P_1 (x) ... (x) P_{n-1}.
///
/// Letters are stored as symplectic bit masks laid out like amplitude
/// indices (see qubit_bit), so P|b> = phase(b) |b ^ x_mask()>.
class PauliTerm {
 public:
  PauliTerm() = default;

  /// Parses a letter string such as "XIZY" ('_' is accepted for I).
  PauliTerm(std::size_t n, std::string_view letters, Complex coefficient = 1.0);

  static PauliTerm identity(std::size_t n, Complex coefficient = 1.0);
  static PauliTerm from_masks(std::size_t n, std::uint64_t x_mask,
                              std::uint64_t z_mask, Complex coefficient = 1.0);
  static PauliTerm on(std::size_t n,
                      std::initializer_list<std::pair<std::size_t, Pauli>> sites,
                      Complex coefficient = 1.0);

  std::size_t num_qubits() const noexcept { return n_; }
  Complex coefficient() const noexcept { return coefficient_; }
  std::uint64_t x_mask() const noexcept { return x_; }
  std::uint64_t z_mask() const noexcept { return z_; }

  Pauli letter(std::size_t qubit) const;
  std::string letters() const;
  std::size_t weight() const noexcept;
  int y_count() const noexcept;
  bool is_identity() const noexcept { return x_ == 0 && z_ == 0; }

  bool commutes_with(const PauliTerm& other) const;
  bool same_letters(const PauliTerm& other) const noexcept {
    return n_ == other.n_ && x_ == other.x_ && z_ == other.z_;
  }

  PauliTerm with_coefficient(Complex coefficient) const {
    return from_masks(n_, x_, z_, coefficient);
  }

  /// Phase picked up by basis state |b> under the bare string (coefficient
  /// excluded): P|b> = letter_phase(b) |b ^ x_mask()>.
  Complex letter_phase(std::uint64_t basis) const noexcept;

  friend PauliTerm operator*(const PauliTerm& a, const PauliTerm& b);

 private:
  std::size_t n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  Complex coefficient_{1.0, 0.0};
};

/// [a, b] = ab - ba. Pauli strings either commute (result: nullopt) or
/// anticommute, in which case the commutator is the single term 2ab.
std::optional<PauliTerm> commutator(const PauliTerm& a, const PauliTerm& b);

/// Sum of Pauli terms with distinct letter patterns. Inserting a term whose
/// pattern already exists merges the coefficients; exact zeros are erased.
class OperatorSum {
 public:
  using Key = std::pair<std::uint64_t, std::uint64_t>;  // (x_mask, z_mask)

  explicit OperatorSum(std::size_t n = 0) : n_(n) {}
  OperatorSum(std::size_t n, std::initializer_list<PauliTerm> terms);

  std::size_t num_qubits() const noexcept { return n_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  void add(const PauliTerm& term);
  std::vector<PauliTerm> terms() const;
  const std::map<Key, Complex>& coefficients() const noexcept { return terms_; }
  Complex coefficient(const PauliTerm& pattern) const;

  /// True when every coefficient is real to within `tolerance`. Pauli
  /// strings are Hermitian, so this is the Hermiticity test.
  bool hermitian(double tolerance = 1e-12) const;

  /// Sum of |c|^2 over terms (Tr(A^dagger A) / 2^n).
  double coefficient_norm2() const;

  /// Drops terms whose coefficient magnitude is at most `tolerance`.
  void prune(double tolerance);

  OperatorSum& operator+=(const OperatorSum& other);
  OperatorSum& operator*=(Complex scale);

  friend OperatorSum operator+(OperatorSum a, const OperatorSum& b) {
    a += b;
    return a;
  }
  friend OperatorSum operator*(Complex scale, OperatorSum a) {
    a *= scale;
    return a;
  }
  friend OperatorSum operator*(const OperatorSum& a, const OperatorSum& b);
  friend bool operator==(const OperatorSum&, const OperatorSum&) = default;

 private:
  std::size_t n_ = 0;
  std::map<Key, Complex> terms_;
};

OperatorSum commutator(const OperatorSum& a, const OperatorSum& b);

}  // namespace qcurriculum
