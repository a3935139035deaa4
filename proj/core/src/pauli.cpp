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

#include "qcurriculum/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace qcurriculum {

namespace {

constexpr Complex kIPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

Complex i_power(int exponent) { return kIPowers[((exponent % 4) + 4) % 4]; }

void check_size(std::size_t n) {
  if (n == 0 || n > kMaxPauliQubits) {
    throw std::invalid_argument("Pauli string size must be in [1, 64]");
  }
}

}  // namespace

PauliTerm::PauliTerm(std::size_t n, std::string_view letters, Complex coefficient)
    : n_(n), coefficient_(coefficient) {
  check_size(n);
  if (letters.size() != n) {
    throw std::invalid_argument("Pauli letter string length " +
                                std::to_string(letters.size()) +
                                " does not match qubit count " + std::to_string(n));
  }
  for (std::size_t q = 0; q < n; ++q) {
    const std::uint64_t bit = qubit_bit(n, q);
    switch (letters[q]) {
      case 'I':
      case '_':
        break;
      case 'X':
        x_ |= bit;
        break;
      case 'Y':
        x_ |= bit;
        z_ |= bit;
        break;
      case 'Z':
        z_ |= bit;
        break;
      default:
        throw std::invalid_argument(std::string("unknown Pauli letter '") + letters[q] + "'");
    }
  }
}

PauliTerm PauliTerm::identity(std::size_t n, Complex coefficient) {
  return from_masks(n, 0, 0, coefficient);
}

PauliTerm PauliTerm::from_masks(std::size_t n, std::uint64_t x_mask,
                                std::uint64_t z_mask, Complex coefficient) {
  check_size(n);
  const std::uint64_t valid = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  if ((x_mask | z_mask) & ~valid) {
    throw std::invalid_argument("Pauli mask addresses qubits outside the register");
  }
  PauliTerm term;
  term.n_ = n;
  term.x_ = x_mask;
  term.z_ = z_mask;
  term.coefficient_ = coefficient;
  return term;
}

PauliTerm PauliTerm::on(std::size_t n,
                        std::initializer_list<std::pair<std::size_t, Pauli>> sites,
                        Complex coefficient) {
  check_size(n);
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  for (const auto& [qubit, pauli] : sites) {
    if (qubit >= n) throw std::out_of_range("qubit index out of range");
    const std::uint64_t bit = qubit_bit(n, qubit);
    if ((x | z) & bit) throw std::invalid_argument("qubit listed twice");
    if (pauli == Pauli::X || pauli == Pauli::Y) x |= bit;
    if (pauli == Pauli::Z || pauli == Pauli::Y) z |= bit;
  }
  return from_masks(n, x, z, coefficient);
}

Pauli PauliTerm::letter(std::size_t qubit) const {
  if (qubit >= n_) throw std::out_of_range("qubit index out of range");
  const std::uint64_t bit = qubit_bit(n_, qubit);
  const bool x = x_ & bit;
  const bool z = z_ & bit;
  if (x && z) return Pauli::Y;
  if (x) return Pauli::X;
  if (z) return Pauli::Z;
  return Pauli::I;
}

std::string PauliTerm::letters() const {
  static constexpr char kNames[] = {'I', 'X', 'Y', 'Z'};
  std::string out(n_, 'I');
  for (std::size_t q = 0; q < n_; ++q) out[q] = kNames[static_cast<int>(letter(q))];
  return out;
}

std::size_t PauliTerm::weight() const noexcept {
  return static_cast<std::size_t>(std::popcount(x_ | z_));
}

int PauliTerm::y_count() const noexcept { return std::popcount(x_ & z_); }

bool PauliTerm::commutes_with(const PauliTerm& other) const {
  if (n_ != other.n_) throw std::invalid_argument("Pauli size mismatch");
  return (std::popcount((x_ & other.z_) ^ (z_ & other.x_)) & 1) == 0;
}

Complex PauliTerm::letter_phase(std::uint64_t basis) const noexcept {
  const int exponent = y_count() + 2 * (std::popcount(z_ & basis) & 1);
  return i_power(exponent);
}

PauliTerm operator*(const PauliTerm& a, const PauliTerm& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("Pauli size mismatch");
  const std::uint64_t x = a.x_ ^ b.x_;
  const std::uint64_t z = a.z_ ^ b.z_;
  const int exponent = a.y_count() + b.y_count() - std::popcount(x & z) +
                       2 * std::popcount(a.z_ & b.x_);
  return PauliTerm::from_masks(a.n_, x, z,
                               a.coefficient_ * b.coefficient_ * i_power(exponent));
}

std::optional<PauliTerm> commutator(const PauliTerm& a, const PauliTerm& b) {
  if (a.commutes_with(b)) return std::nullopt;
  const PauliTerm product = a * b;
  return product.with_coefficient(2.0 * product.coefficient());
}

OperatorSum::OperatorSum(std::size_t n, std::initializer_list<PauliTerm> terms) : n_(n) {
  for (const auto& term : terms) add(term);
}

void OperatorSum::add(const PauliTerm& term) {
  if (term.num_qubits() != n_) {
    throw std::invalid_argument("term acts on " + std::to_string(term.num_qubits()) +
                                " qubits, sum on " + std::to_string(n_));
  }
  const Key key{term.x_mask(), term.z_mask()};
  auto [it, inserted] = terms_.try_emplace(key, term.coefficient());
  if (!inserted) it->second += term.coefficient();
  if (it->second == Complex{0.0, 0.0}) terms_.erase(it);
}

std::vector<PauliTerm> OperatorSum::terms() const {
  std::vector<PauliTerm> out;
  out.reserve(terms_.size());
  for (const auto& [key, c] : terms_) {
    out.push_back(PauliTerm::from_masks(n_, key.first, key.second, c));
  }
  return out;
}

Complex OperatorSum::coefficient(const PauliTerm& pattern) const {
  const auto it = terms_.find({pattern.x_mask(), pattern.z_mask()});
  return it == terms_.end() ? Complex{} : it->second;
}

bool OperatorSum::hermitian(double tolerance) const {
  for (const auto& [key, c] : terms_) {
    if (std::abs(c.imag()) > tolerance) return false;
  }
  return true;
}

double OperatorSum::coefficient_norm2() const {
  double total = 0.0;
  for (const auto& [key, c] : terms_) total += std::norm(c);
  return total;
}

void OperatorSum::prune(double tolerance) {
  std::erase_if(terms_, [tolerance](const auto& kv) { return std::abs(kv.second) <= tolerance; });
}

OperatorSum& OperatorSum::operator+=(const OperatorSum& other) {
  if (other.n_ != n_) throw std::invalid_argument("operator size mismatch");
  for (const auto& [key, c] : other.terms_) {
    add(PauliTerm::from_masks(n_, key.first, key.second, c));
  }
  return *this;
}

OperatorSum& OperatorSum::operator*=(Complex scale) {
  if (scale == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [key, c] : terms_) c *= scale;
  return *this;
}

OperatorSum operator*(const OperatorSum& a, const OperatorSum& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("operator size mismatch");
  OperatorSum out(a.n_);
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) out.add(ta * tb);
  }
  return out;
}

OperatorSum commutator(const OperatorSum& a, const OperatorSum& b) {
  if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("operator size mismatch");
  OperatorSum out(a.num_qubits());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      if (auto c = commutator(ta, tb)) out.add(*c);
    }
  }
  return out;
}

}  // namespace qcurriculum
