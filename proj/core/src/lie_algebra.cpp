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

#include "qcurriculum/lie_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qcurriculum/errors.hpp"
#include "qcurriculum/file_io.hpp"
#include "qcurriculum/hash.hpp"

namespace qcurriculum {

namespace {

using Key = OperatorSum::Key;
using SparseVec = std::vector<std::pair<Key, double>>;  // sorted by key

constexpr std::string_view kBasisFormat = "qcurriculum-lie-basis";
constexpr int kBasisVersion = 1;

double dot(const SparseVec& a, const SparseVec& b) {
  double total = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      total += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return total;
}

/// a <- a - s * b
void axpy(SparseVec& a, double s, const SparseVec& b) {
  SparseVec out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      out.push_back(*ia++);
    } else if (ia == a.end() || ib->first < ia->first) {
      out.emplace_back(ib->first, -s * ib->second);
      ++ib;
    } else {
      const double v = ia->second - s * ib->second;
      if (v != 0.0) out.emplace_back(ia->first, v);
      ++ia;
      ++ib;
    }
  }
  a = std::move(out);
}

double norm(const SparseVec& a) { return std::sqrt(dot(a, a)); }

void scale(SparseVec& a, double s) {
  for (auto& [key, value] : a) value *= s;
}

SparseVec to_sparse(const OperatorSum& op, double tolerance) {
  SparseVec v;
  for (const auto& [key, c] : op.coefficients()) {
    if (std::abs(c.imag()) > tolerance) {
      throw std::invalid_argument("Lie generators must be Hermitian");
    }
    if (c.real() != 0.0) v.emplace_back(key, c.real());
  }
  return v;
}

OperatorSum to_operator(std::size_t n, const SparseVec& v, double factor) {
  OperatorSum op(n);
  for (const auto& [key, value] : v) {
    op.add(PauliTerm::from_masks(n, key.first, key.second, value * factor));
  }
  return op;
}

/// i [g, b] for real-coefficient Hermitian g and b; the result is Hermitian.
SparseVec i_commutator(std::size_t n, const SparseVec& g, const SparseVec& b) {
  std::map<Key, double> acc;
  for (const auto& [gk, gv] : g) {
    const auto gp = PauliTerm::from_masks(n, gk.first, gk.second, gv);
    for (const auto& [bk, bv] : b) {
      const auto bp = PauliTerm::from_masks(n, bk.first, bk.second, bv);
      const auto c = commutator(gp, bp);
      if (!c) continue;
      // i * (purely imaginary coefficient) is real.
      acc[{c->x_mask(), c->z_mask()}] += -c->coefficient().imag();
    }
  }
  SparseVec out;
  out.reserve(acc.size());
  for (const auto& [key, value] : acc) {
    if (value != 0.0) out.emplace_back(key, value);
  }
  return out;
}

/// Orthogonalizes `v` against `basis` (two MGS passes) and returns the
/// residual norm.
double orthogonalize(SparseVec& v, const std::vector<SparseVec>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      const double overlap = dot(v, b);
      if (overlap != 0.0) axpy(v, overlap, b);
    }
  }
  return norm(v);
}

std::vector<SparseVec> unit_elements(const LieBasis& basis) {
  // Elements store coefficients scaled by 2^{-n/2}; undo it.
  const double factor = std::sqrt(std::ldexp(1.0, static_cast<int>(basis.n)));
  std::vector<SparseVec> out;
  out.reserve(basis.elements.size());
  for (const auto& e : basis.elements) {
    auto v = to_sparse(e, 1e-12);
    scale(v, factor);
    out.push_back(std::move(v));
  }
  return out;
}

void check_dimension(std::size_t n, const LieBasis& basis) {
  if (n != basis.n) {
    throw std::invalid_argument(fmt::format("{}-qubit input against a {}-qubit Lie basis", n,
                                            basis.n));
  }
}

std::string element_text(const OperatorSum& op) {
  std::string text;
  for (const auto& term : op.terms()) {
    text += fmt::format("{}:{:.17g}:{:.17g};", term.letters(), term.coefficient().real(),
                        term.coefficient().imag());
  }
  return text;
}

}  // namespace

std::vector<OperatorSum> matchgate_generators(std::size_t n) {
  if (n < 1) throw std::invalid_argument("matchgate generators need n >= 1");
  std::vector<OperatorSum> gens;
  for (std::size_t i = 0; i < n; ++i) {
    gens.push_back(OperatorSum(n, {PauliTerm::on(n, {{i, Pauli::Z}})}));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    gens.push_back(OperatorSum(n, {PauliTerm::on(n, {{i, Pauli::X}, {i + 1, Pauli::X}})}));
  }
  return gens;
}

std::string fingerprint(std::span<const OperatorSum> generators) {
  std::uint64_t state = fnv1a64("generators");
  for (const auto& g : generators) {
    state = fnv1a64(fmt::format("n={}|", g.num_qubits()), state);
    state = fnv1a64(element_text(g), state);
    state = fnv1a64("#", state);
  }
  return hex64(state);
}

LieBasis lie_closure(std::span<const OperatorSum> generators, const LieClosureOptions& options) {
  if (generators.empty()) throw std::invalid_argument("Lie closure needs at least one generator");
  const std::size_t n = generators.front().num_qubits();
  std::vector<SparseVec> gens;
  for (const auto& g : generators) {
    if (g.num_qubits() != n) throw std::invalid_argument("generators act on different registers");
    if (!g.hermitian()) throw std::invalid_argument("Lie generators must be Hermitian");
    auto v = to_sparse(g, 1e-12);
    if (v.empty()) throw std::invalid_argument("Lie generators must be nonzero");
    gens.push_back(std::move(v));
  }

  std::vector<SparseVec> basis;
  auto admit = [&](SparseVec v) {
    const double residual = orthogonalize(v, basis);
    if (residual <= options.tolerance) return;
    if (basis.size() >= options.cap) {
      throw NumericalError(fmt::format("Lie closure exceeds the dimension cap of {}", options.cap));
    }
    scale(v, 1.0 / residual);
    basis.push_back(std::move(v));
  };
  for (const auto& g : gens) admit(g);
  for (std::size_t next = 0; next < basis.size(); ++next) {
    for (const auto& g : gens) admit(i_commutator(n, g, basis[next]));
  }

  LieBasis out;
  out.n = n;
  out.generator_fingerprint = fingerprint(generators);
  const double factor = 1.0 / std::sqrt(std::ldexp(1.0, static_cast<int>(n)));
  out.elements.reserve(basis.size());
  for (const auto& v : basis) out.elements.push_back(to_operator(n, v, factor));
  return out;
}

double trace_product(const OperatorSum& a, const OperatorSum& b) {
  if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("register size mismatch");
  double total = 0.0;
  const auto& cb = b.coefficients();
  for (const auto& [key, c] : a.coefficients()) {
    const auto it = cb.find(key);
    if (it != cb.end()) total += (c * it->second).real();
  }
  return std::ldexp(total, static_cast<int>(a.num_qubits()));
}

double orthonormality_residual(const LieBasis& basis) {
  const auto unit = unit_elements(basis);
  double worst = 0.0;
  for (std::size_t j = 0; j < unit.size(); ++j) {
    for (std::size_t k = j; k < unit.size(); ++k) {
      const double target = j == k ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(dot(unit[j], unit[k]) - target));
    }
  }
  return worst;
}

double span_residual(const OperatorSum& op, const LieBasis& basis) {
  check_dimension(op.num_qubits(), basis);
  auto v = to_sparse(op, 1e-12);
  const double residual = orthogonalize(v, unit_elements(basis));
  return residual * std::sqrt(std::ldexp(1.0, static_cast<int>(basis.n)));
}

double g_purity(const OperatorSum& op, const LieBasis& basis) {
  check_dimension(op.num_qubits(), basis);
  double total = 0.0;
  for (const auto& element : basis.elements) {
    const double t = trace_product(element, op);
    total += t * t;
  }
  return total;
}

double g_purity(const StateVector& psi, const LieBasis& basis) {
  check_dimension(psi.num_qubits(), basis);
  std::map<Key, double> expectations;
  for (const auto& element : basis.elements) {
    for (const auto& [key, c] : element.coefficients()) expectations.emplace(key, 0.0);
  }
  for (auto& [key, value] : expectations) {
    value = expectation(PauliTerm::from_masks(basis.n, key.first, key.second), psi).real();
  }
  double total = 0.0;
  for (const auto& element : basis.elements) {
    double t = 0.0;
    for (const auto& [key, c] : element.coefficients()) t += c.real() * expectations.at(key);
    total += t * t;
  }
  return total;
}

double variance_estimate(const StateVector& rho, const OperatorSum& observable,
                         const LieBasis& basis) {
  if (basis.dim() == 0) throw std::invalid_argument("empty Lie basis");
  return g_purity(rho, basis) * g_purity(observable, basis) / static_cast<double>(basis.dim());
}

double pg_score(const StateVector& psi, const LieBasis& basis) {
  return std::clamp(1.0 - g_purity(psi, basis), 0.0, 1.0);
}

std::string basis_to_json(const LieBasis& basis) {
  nlohmann::json elements = nlohmann::json::array();
  for (const auto& e : basis.elements) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : e.terms()) terms.push_back({t.letters(), t.coefficient().real()});
    elements.push_back(std::move(terms));
  }
  nlohmann::json doc;
  doc["format"] = kBasisFormat;
  doc["version"] = kBasisVersion;
  doc["n"] = basis.n;
  doc["dim"] = basis.dim();
  doc["generator_fingerprint"] = basis.generator_fingerprint;
  doc["content_fnv1a64"] = hex64(fnv1a64(elements.dump()));
  doc["elements"] = std::move(elements);
  return doc.dump(1) + "\n";
}

LieBasis basis_from_json(const std::string& text, const std::string& expected_fingerprint) {
  LieBasis basis;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format").get<std::string>() != kBasisFormat ||
        doc.at("version").get<int>() != kBasisVersion) {
      throw IoError("not a version-1 Lie basis file");
    }
    const auto& elements = doc.at("elements");
    if (doc.at("content_fnv1a64").get<std::string>() != hex64(fnv1a64(elements.dump()))) {
      throw IoError("Lie basis content hash mismatch");
    }
    basis.n = doc.at("n").get<std::size_t>();
    basis.generator_fingerprint = doc.at("generator_fingerprint").get<std::string>();
    for (const auto& e : elements) {
      OperatorSum op(basis.n);
      for (const auto& t : e) {
        op.add(PauliTerm(basis.n, t.at(0).get<std::string>(), t.at(1).get<double>()));
      }
      basis.elements.push_back(std::move(op));
    }
    if (basis.dim() != doc.at("dim").get<std::size_t>()) {
      throw IoError("Lie basis dimension does not match its element list");
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed Lie basis file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("malformed Lie basis file: ") + e.what());
  }
  if (!expected_fingerprint.empty() && basis.generator_fingerprint != expected_fingerprint) {
    throw IoError("Lie basis generator fingerprint mismatch: expected " + expected_fingerprint +
                  ", found " + basis.generator_fingerprint);
  }
  return basis;
}

void save_basis(const std::string& path, const LieBasis& basis) {
  write_file_atomic(path, basis_to_json(basis));
}

LieBasis load_basis(const std::string& path, const std::string& expected_fingerprint) {
  return basis_from_json(read_file(path), expected_fingerprint);
}

}  // namespace qcurriculum
