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

#include "qcurriculum/qcnn.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qcurriculum/errors.hpp"
#include "qcurriculum/random.hpp"

namespace qcurriculum {

namespace {

constexpr std::uint64_t kParamStream = 0x706172616d73ULL;  // "params"

/// a * b without the NaN recovery path of std::complex multiplication.
inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

using Mat4 = std::array<Complex, 16>;

Mat4 mat_identity() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i * 5] = 1.0;
  return m;
}

Mat4 mat_mul(const Mat4& a, const Mat4& b) {
  Mat4 out{};
  for (int r = 0; r < 4; ++r) {
    for (int k = 0; k < 4; ++k) {
      const Complex v = a[r * 4 + k];
      if (v == Complex{}) continue;
      for (int c = 0; c < 4; ++c) out[r * 4 + c] += mul(v, b[k * 4 + c]);
    }
  }
  return out;
}

Mat4 mat_dagger(const Mat4& a) {
  Mat4 out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out[c * 4 + r] = std::conj(a[r * 4 + c]);
  }
  return out;
}

inline bool odd_parity(std::uint64_t v) {
  v ^= v >> 32;
  v ^= v >> 16;
  v ^= v >> 8;
  v ^= v >> 4;
  return ((0x6996U >> (v & 0xfU)) & 1U) != 0;
}

/// exp(-i angle P) restricted to the control subspace, applied in place.
void apply_rotation(const Gate& gate, double angle, std::span<Complex> amps) {
  const std::uint64_t x = gate.generator.x_mask();
  const std::uint64_t z = gate.generator.z_mask();
  const std::uint64_t ctrl = gate.control_mask;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const std::size_t dim = amps.size();
  if (x == 0) {
    const Complex plus{c, -s};
    const Complex minus{c, s};
    for (std::uint64_t b = 0; b < dim; ++b) {
      if ((b & ctrl) != ctrl) continue;
      amps[b] = mul(amps[b], odd_parity(z & b) ? minus : plus);
    }
    return;
  }
  // a'[b] = c a[b] - i s (P a)[b], with (P a)[b] = phase(b ^ x) a[b ^ x].
  const Complex k_even = mul(Complex{0.0, -s}, gate.generator.letter_phase(0));
  const Complex k_odd = -k_even;
  const std::uint64_t low = std::bit_floor(x) - 1;
  const bool flip = odd_parity(z & x);
  for (std::uint64_t i = 0; i < dim / 2; ++i) {
    const std::uint64_t b = ((i & ~low) << 1) | (i & low);
    if ((b & ctrl) != ctrl) continue;
    const bool odd = odd_parity(z & b);
    const Complex lo = amps[b];
    const Complex hi = amps[b ^ x];
    amps[b] = c * lo + mul((odd != flip) ? k_odd : k_even, hi);
    amps[b ^ x] = c * hi + mul(odd ? k_odd : k_even, lo);
  }
}

/// <bra| G |ket> for G = Proj_1(controls) (x) P.
Complex generator_overlap(const Gate& gate, std::span<const Complex> bra,
                          std::span<const Complex> ket) {
  const std::uint64_t x = gate.generator.x_mask();
  const std::uint64_t z = gate.generator.z_mask();
  const std::uint64_t ctrl = gate.control_mask;
  double re = 0.0;
  double im = 0.0;
  for (std::uint64_t b = 0; b < bra.size(); ++b) {
    if ((b & ctrl) != ctrl) continue;
    const Complex t = mul(std::conj(bra[b]), ket[b ^ x]);
    if (odd_parity(z & (b ^ x))) {
      re -= t.real();
      im -= t.imag();
    } else {
      re += t.real();
      im += t.imag();
    }
  }
  return mul(Complex{re, im}, gate.generator.letter_phase(0));
}

void check_inputs(const QcnnArchitecture& arch, std::span<const double> theta,
                  const StateVector& psi) {
  if (psi.num_qubits() != arch.n_in) {
    throw std::invalid_argument("QCNN expects " + std::to_string(arch.n_in) +
                                "-qubit input, got " + std::to_string(psi.num_qubits()));
  }
  if (theta.size() != arch.total_params) {
    throw std::invalid_argument("QCNN expects " + std::to_string(arch.total_params) +
                                " parameters, got " + std::to_string(theta.size()));
  }
}

void check_classes(const QcnnArchitecture& arch, std::size_t classes) {
  if (classes < 1 || classes > arch.num_outcomes()) {
    throw std::invalid_argument("class count must be in [1, " +
                                std::to_string(arch.num_outcomes()) + "]");
  }
}

void check_label(const LabeledExample& example, std::size_t classes) {
  if (example.label.size() != classes) {
    throw std::invalid_argument("label length " + std::to_string(example.label.size()) +
                                " does not match class count " + std::to_string(classes));
  }
}

class CircuitBuilder {
 public:
  CircuitBuilder(QcnnArchitecture& arch, double scale) : arch_(arch), scale_(scale) {}

  std::size_t next_param() const { return arch_.total_params; }
  std::size_t reserve(std::size_t count) {
    const std::size_t first = arch_.total_params;
    arch_.total_params += count;
    return first;
  }

  void rotation(std::initializer_list<std::pair<std::size_t, Pauli>> sites, std::size_t param,
                std::size_t control = kNoControl) {
    Gate g;
    g.generator = PauliTerm::on(arch_.n_in, sites);
    g.control_mask = control == kNoControl ? 0 : qubit_bit(arch_.n_in, control);
    g.param = param;
    g.scale = scale_;
    arch_.gates.push_back(std::move(g));
  }

  static constexpr std::size_t kNoControl = ~std::size_t{0};

 private:
  QcnnArchitecture& arch_;
  double scale_;
};

/// Two-qubit unit: general single-qubit rotations on both sites, an
/// XX/YY/ZZ entangler, and a second layer of single-qubit rotations.
void full_block(CircuitBuilder& circuit, std::size_t a, std::size_t b, std::size_t p) {
  auto u3 = [&](std::size_t q, std::size_t first) {
    circuit.rotation({{q, Pauli::Z}}, first);
    circuit.rotation({{q, Pauli::Y}}, first + 1);
    circuit.rotation({{q, Pauli::Z}}, first + 2);
  };
  u3(a, p);
  u3(b, p + 3);
  circuit.rotation({{a, Pauli::X}, {b, Pauli::X}}, p + 6);
  circuit.rotation({{a, Pauli::Y}, {b, Pauli::Y}}, p + 7);
  circuit.rotation({{a, Pauli::Z}, {b, Pauli::Z}}, p + 8);
  u3(a, p + 9);
  u3(b, p + 12);
}

constexpr std::size_t kFullBlockParams = 15;
constexpr std::size_t kFullPoolParams = 3;

/// Brickwork pairs on a ring of active qubits: even bonds, then odd bonds.
std::vector<std::pair<std::size_t, std::size_t>> ring_pairs(const std::vector<std::size_t>& q) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i + 1 < q.size(); i += 2) pairs.emplace_back(q[i], q[i + 1]);
  for (std::size_t i = 1; i < q.size(); i += 2) pairs.emplace_back(q[i], q[(i + 1) % q.size()]);
  return pairs;
}

void add_full_conv(QcnnArchitecture& arch, CircuitBuilder& circuit,
                   const std::vector<std::size_t>& active) {
  Layer layer;
  layer.kind = LayerKind::Conv;
  layer.param_offset = circuit.reserve(kFullBlockParams);
  layer.param_count = kFullBlockParams;
  layer.qubits_in = active;
  layer.qubits_out = active;
  layer.pairs = ring_pairs(active);
  for (const auto& [a, b] : layer.pairs) full_block(circuit, a, b, layer.param_offset);
  arch.layers.push_back(std::move(layer));
}

/// Measures every other active qubit; the measurement outcome conditions a
/// general rotation on its right-hand neighbour.
void add_full_pool(QcnnArchitecture& arch, CircuitBuilder& circuit,
                   const std::vector<std::size_t>& active) {
  Layer layer;
  layer.kind = LayerKind::Pool;
  layer.param_offset = circuit.reserve(kFullPoolParams);
  layer.param_count = kFullPoolParams;
  layer.qubits_in = active;
  for (std::size_t i = 0; i + 1 < active.size(); i += 2) {
    const std::size_t measured = active[i];
    const std::size_t kept = active[i + 1];
    layer.pairs.emplace_back(measured, kept);
    layer.qubits_out.push_back(kept);
    const std::size_t p = layer.param_offset;
    circuit.rotation({{kept, Pauli::Z}}, p, measured);
    circuit.rotation({{kept, Pauli::Y}}, p + 1, measured);
    circuit.rotation({{kept, Pauli::Z}}, p + 2, measured);
  }
  arch.layers.push_back(std::move(layer));
}

QcnnArchitecture build_full() {
  QcnnArchitecture arch;
  arch.variant = QcnnVariant::Full;
  CircuitBuilder circuit(arch, 0.5);
  std::vector<std::size_t> active{0, 1, 2, 3, 4, 5, 6, 7};
  for (int stage = 0; stage < 2; ++stage) {
    add_full_conv(arch, circuit, active);
    add_full_pool(arch, circuit, active);
    active = arch.layers.back().qubits_out;
  }
  // Readout: one unshared two-qubit block on the surviving pair.
  Layer layer;
  layer.kind = LayerKind::Conv;
  layer.param_offset = circuit.reserve(kFullBlockParams);
  layer.param_count = kFullBlockParams;
  layer.qubits_in = active;
  layer.qubits_out = active;
  layer.pairs = {{active[0], active[1]}};
  full_block(circuit, active[0], active[1], layer.param_offset);
  arch.layers.push_back(std::move(layer));
  arch.output_qubits = active;
  return arch;
}

/// Matchgate stage on a contiguous window: Z rotations, XX on even and odd
/// nearest-neighbour bonds, Z rotations. Pooling couples the two outermost
/// qubits on each side inward with XX, then drops them.
QcnnArchitecture build_matchgate() {
  QcnnArchitecture arch;
  arch.variant = QcnnVariant::Matchgate;
  CircuitBuilder circuit(arch, 1.0);
  std::vector<std::size_t> active{0, 1, 2, 3, 4, 5, 6, 7};
  for (int stage = 0; stage < 2; ++stage) {
    Layer conv;
    conv.kind = LayerKind::Conv;
    conv.param_count = 4;
    conv.param_offset = circuit.reserve(conv.param_count);
    conv.qubits_in = active;
    conv.qubits_out = active;
    const std::size_t p = conv.param_offset;
    for (const std::size_t q : active) circuit.rotation({{q, Pauli::Z}}, p);
    for (std::size_t i = 0; i + 1 < active.size(); i += 2) {
      conv.pairs.emplace_back(active[i], active[i + 1]);
      circuit.rotation({{active[i], Pauli::X}, {active[i + 1], Pauli::X}}, p + 1);
    }
    for (std::size_t i = 1; i + 1 < active.size(); i += 2) {
      conv.pairs.emplace_back(active[i], active[i + 1]);
      circuit.rotation({{active[i], Pauli::X}, {active[i + 1], Pauli::X}}, p + 2);
    }
    for (const std::size_t q : active) circuit.rotation({{q, Pauli::Z}}, p + 3);
    arch.layers.push_back(std::move(conv));

    Layer pool;
    pool.kind = LayerKind::Pool;
    pool.param_count = 2;
    pool.param_offset = circuit.reserve(pool.param_count);
    pool.qubits_in = active;
    const std::size_t drop = active.size() / 4;  // per side
    const std::size_t q = pool.param_offset;
    for (std::size_t i = 0; i < drop; ++i) {
      const std::size_t left = active[i];
      const std::size_t right = active[active.size() - 1 - i];
      pool.pairs.emplace_back(left, active[i + 1]);
      pool.pairs.emplace_back(right, active[active.size() - 2 - i]);
      circuit.rotation({{left, Pauli::X}, {active[i + 1], Pauli::X}}, q);
      circuit.rotation({{active[active.size() - 2 - i], Pauli::X}, {right, Pauli::X}}, q);
    }
    pool.qubits_out.assign(active.begin() + static_cast<long>(drop),
                           active.end() - static_cast<long>(drop));
    for (const std::size_t k : pool.qubits_out) circuit.rotation({{k, Pauli::Z}}, q + 1);
    arch.layers.push_back(std::move(pool));
    active = arch.layers.back().qubits_out;
  }
  arch.output_qubits = active;
  return arch;
}

}  // namespace

std::string_view to_string(QcnnVariant variant) {
  return variant == QcnnVariant::Full ? "full" : "matchgate";
}

QcnnVariant parse_qcnn_variant(std::string_view name) {
  if (name == "full") return QcnnVariant::Full;
  if (name == "matchgate") return QcnnVariant::Matchgate;
  throw ConfigError("unknown QCNN variant '" + std::string(name) + "'");
}

std::vector<std::size_t> QcnnArchitecture::register_sizes() const {
  std::vector<std::size_t> sizes{n_in};
  for (const auto& layer : layers) {
    if (layer.kind == LayerKind::Pool) sizes.push_back(layer.qubits_out.size());
  }
  return sizes;
}

QcnnArchitecture build_qcnn(QcnnVariant variant) {
  return variant == QcnnVariant::Full ? build_full() : build_matchgate();
}

QcnnParams random_params(const QcnnArchitecture& arch, std::uint64_t seed) {
  Rng rng(derive_seed(seed, kParamStream));
  QcnnParams params;
  params.theta.resize(arch.total_params);
  for (auto& t : params.theta) t = rng.uniform(-std::numbers::pi, std::numbers::pi);
  return params;
}

Batch batch_of(std::span<const LabeledExample> examples) {
  Batch batch;
  batch.reserve(examples.size());
  for (const auto& e : examples) batch.push_back(&e);
  return batch;
}

Batch batch_of(std::span<const LabeledExample> examples, std::span<const std::size_t> indices) {
  Batch batch;
  batch.reserve(indices.size());
  for (const std::size_t i : indices) batch.push_back(&examples[i]);
  return batch;
}

FusedCircuit::FusedCircuit(const QcnnArchitecture& arch, std::span<const double> theta)
    : n_(arch.n_in),
      total_params_(arch.total_params),
      outcomes_(arch.num_outcomes()),
      outputs_(arch.output_qubits) {
  if (theta.size() != arch.total_params) {
    throw std::invalid_argument("QCNN expects " + std::to_string(arch.total_params) +
                                " parameters, got " + std::to_string(theta.size()));
  }
  std::size_t g = 0;
  while (g < arch.gates.size()) {
    // Grow the run while the combined support stays within two qubits.
    std::uint64_t support = 0;
    std::size_t end = g;
    while (end < arch.gates.size()) {
      const Gate& gate = arch.gates[end];
      const std::uint64_t next = support | gate.generator.x_mask() | gate.generator.z_mask() |
                                 gate.control_mask;
      if (std::popcount(next) > 2) break;
      support = next;
      ++end;
    }
    Block block;
    block.hi_bit = std::bit_floor(support);
    block.lo_bit = std::bit_floor(support & ~block.hi_bit);
    if (block.lo_bit == 0) block.lo_bit = block.hi_bit == 1 ? 2 : 1;  // single-qubit run
    if (block.lo_bit > block.hi_bit) std::swap(block.lo_bit, block.hi_bit);
    auto to_local = [&](std::uint64_t mask) {
      return std::uint64_t{((mask & block.hi_bit) ? 2U : 0U) | ((mask & block.lo_bit) ? 1U : 0U)};
    };
    block.u = mat_identity();
    for (std::size_t k = g; k < end; ++k) {
      const Gate& gate = arch.gates[k];
      const auto local = PauliTerm::from_masks(2, to_local(gate.generator.x_mask()),
                                               to_local(gate.generator.z_mask()));
      const std::uint64_t ctrl = to_local(gate.control_mask);
      LocalGate lg;
      lg.param = gate.param;
      lg.scale = gate.scale;
      const double angle = gate.scale * theta[gate.param];
      const double c = std::cos(angle);
      const double s = std::sin(angle);
      lg.u = mat_identity();
      for (std::uint64_t col = 0; col < 4; ++col) {
        if ((col & ctrl) != ctrl) continue;
        const std::uint64_t row = col ^ local.x_mask();
        lg.g[row * 4 + col] = local.letter_phase(col);
        // exp(-i a G) = 1 - Proj + cos(a) Proj - i sin(a) G
        lg.u[col * 4 + col] = c;
        lg.u[row * 4 + col] += Complex{0.0, -s} * lg.g[row * 4 + col];
      }
      block.u = mat_mul(lg.u, block.u);
      block.gates.push_back(lg);
    }
    blocks_.push_back(std::move(block));
    g = end;
  }
}

void FusedCircuit::apply(const Mat4& u, const Block& block, std::vector<Complex>& amps) const {
  const std::uint64_t dim = amps.size();
  const std::uint64_t both = block.hi_bit | block.lo_bit;
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (b & both) continue;
    const std::uint64_t idx[4] = {b, b | block.lo_bit, b | block.hi_bit, b | both};
    const Complex in[4] = {amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]};
    for (int r = 0; r < 4; ++r) {
      amps[idx[r]] = mul(u[r * 4], in[0]) + mul(u[r * 4 + 1], in[1]) +
                     mul(u[r * 4 + 2], in[2]) + mul(u[r * 4 + 3], in[3]);
    }
  }
}

std::vector<Complex> FusedCircuit::evolve(const StateVector& psi) const {
  if (psi.num_qubits() != n_) {
    throw std::invalid_argument("QCNN expects " + std::to_string(n_) + "-qubit input, got " +
                                std::to_string(psi.num_qubits()));
  }
  std::vector<Complex> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  for (const auto& block : blocks_) apply(block.u, block, amps);
  return amps;
}

Prediction FusedCircuit::forward(const StateVector& psi) const {
  return {marginal_probs(evolve(psi), n_, outputs_)};
}

LossGradient FusedCircuit::gradient(const LabeledExample& example, std::size_t classes) const {
  if (classes < 1 || classes > outcomes_) {
    throw std::invalid_argument("class count must be in [1, " + std::to_string(outcomes_) + "]");
  }
  check_label(example, classes);
  auto phi = evolve(example.state);

  std::vector<std::size_t> outcome(phi.size());
  for (std::uint64_t b = 0; b < phi.size(); ++b) {
    std::size_t o = 0;
    for (const std::size_t q : outputs_) o = (o << 1) | ((b & qubit_bit(n_, q)) ? 1U : 0U);
    outcome[b] = o;
  }
  std::vector<double> probs(outcomes_, 0.0);
  for (std::uint64_t b = 0; b < phi.size(); ++b) probs[outcome[b]] += std::norm(phi[b]);

  LossGradient out;
  out.loss = loss_from_probs(probs, example.label, classes);
  out.gradient.assign(total_params_, 0.0);

  // d loss / d p_j as a diagonal observable on the output register.
  std::vector<double> weight(outcomes_, 0.0);
  for (std::size_t j = 0; j < classes; ++j) weight[j] = 2.0 * (probs[j] - example.label[j]);
  std::vector<Complex> lambda(phi.size());
  for (std::uint64_t b = 0; b < phi.size(); ++b) lambda[b] = weight[outcome[b]] * phi[b];

  for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
    const Block& block = *it;
    apply(mat_dagger(block.u), block, phi);
    // X = Tr_rest(|phi_in><lambda_out|) on the block's two qubits.
    Mat4 x{};
    const std::uint64_t both = block.hi_bit | block.lo_bit;
    for (std::uint64_t b = 0; b < phi.size(); ++b) {
      if (b & both) continue;
      const std::uint64_t idx[4] = {b, b | block.lo_bit, b | block.hi_bit, b | both};
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) x[r * 4 + c] += mul(phi[idx[r]], std::conj(lambda[idx[c]]));
      }
    }
    apply(mat_dagger(block.u), block, lambda);
    // After gate j the reduced operator is Y_j = g_j Y_{j-1} g_j^dagger
    // with Y_0 = X U_block, and d loss / d theta += 2 s Im Tr(G_j Y_j).
    Mat4 y = mat_mul(x, block.u);
    for (const auto& gate : block.gates) {
      y = mat_mul(mat_mul(gate.u, y), mat_dagger(gate.u));
      Complex trace{};
      for (int r = 0; r < 4; ++r) {
        for (int k = 0; k < 4; ++k) trace += mul(gate.g[r * 4 + k], y[k * 4 + r]);
      }
      out.gradient[gate.param] += 2.0 * gate.scale * trace.imag();
    }
  }
  return out;
}

std::vector<Complex> evolve(const QcnnArchitecture& arch, std::span<const double> theta,
                            const StateVector& psi) {
  check_inputs(arch, theta, psi);
  return FusedCircuit(arch, theta).evolve(psi);
}

Prediction forward(const QcnnArchitecture& arch, std::span<const double> theta,
                   const StateVector& psi) {
  check_inputs(arch, theta, psi);
  return FusedCircuit(arch, theta).forward(psi);
}

double loss_from_probs(std::span<const double> probs, std::span<const double> label,
                       std::size_t classes) {
  if (label.size() != classes || probs.size() < classes) {
    throw std::invalid_argument("label length does not match class count");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < classes; ++j) {
    const double d = probs[j] - label[j];
    total += d * d;
  }
  return total;
}

double loss(const QcnnArchitecture& arch, std::span<const double> theta,
            const LabeledExample& example, std::size_t classes) {
  check_classes(arch, classes);
  check_label(example, classes);
  return loss_from_probs(forward(arch, theta, example.state).probs, example.label, classes);
}

double risk(const QcnnArchitecture& arch, std::span<const double> theta, const Batch& batch,
            std::size_t classes) {
  if (batch.empty()) throw std::invalid_argument("risk of an empty batch");
  double total = 0.0;
  for (const auto* e : batch) total += loss(arch, theta, *e, classes);
  return total / static_cast<double>(batch.size());
}

LossGradient example_gradient(const QcnnArchitecture& arch, std::span<const double> theta,
                              const LabeledExample& example, std::size_t classes) {
  check_classes(arch, classes);
  check_inputs(arch, theta, example.state);
  return FusedCircuit(arch, theta).gradient(example, classes);
}

LossGradient example_gradient_gatewise(const QcnnArchitecture& arch, std::span<const double> theta,
                                       const LabeledExample& example, std::size_t classes) {
  check_classes(arch, classes);
  check_label(example, classes);
  check_inputs(arch, theta, example.state);
  std::vector<Complex> phi(example.state.amplitudes().begin(), example.state.amplitudes().end());
  for (const auto& gate : arch.gates) apply_rotation(gate, gate.scale * theta[gate.param], phi);
  const auto probs = marginal_probs(phi, arch.n_in, arch.output_qubits);

  LossGradient out;
  out.loss = loss_from_probs(probs, example.label, classes);
  out.gradient.assign(arch.total_params, 0.0);
  std::vector<double> weight(arch.num_outcomes(), 0.0);
  for (std::size_t j = 0; j < classes; ++j) weight[j] = 2.0 * (probs[j] - example.label[j]);
  std::vector<Complex> lambda(phi.size());
  for (std::uint64_t b = 0; b < phi.size(); ++b) {
    std::size_t o = 0;
    for (const std::size_t q : arch.output_qubits) {
      o = (o << 1) | ((b & qubit_bit(arch.n_in, q)) ? 1U : 0U);
    }
    lambda[b] = weight[o] * phi[b];
  }
  for (auto it = arch.gates.rbegin(); it != arch.gates.rend(); ++it) {
    const Gate& gate = *it;
    out.gradient[gate.param] += 2.0 * gate.scale * generator_overlap(gate, lambda, phi).imag();
    const double angle = -gate.scale * theta[gate.param];
    apply_rotation(gate, angle, phi);
    apply_rotation(gate, angle, lambda);
  }
  return out;
}

std::vector<double> gradient(const QcnnArchitecture& arch, std::span<const double> theta,
                             const Batch& batch, std::size_t classes) {
  if (batch.empty()) throw std::invalid_argument("gradient of an empty batch");
  check_classes(arch, classes);
  const FusedCircuit circuit(arch, theta);
  std::vector<double> total(arch.total_params, 0.0);
  for (const auto* e : batch) {
    check_inputs(arch, theta, e->state);
    const auto g = circuit.gradient(*e, classes).gradient;
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += g[k];
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (auto& v : total) v *= inv;
  return total;
}

int predict_class(std::span<const double> probs, std::size_t classes) {
  if (classes == 0 || probs.size() < classes) throw std::invalid_argument("bad class count");
  std::size_t best = 0;
  for (std::size_t j = 1; j < classes; ++j) {
    if (probs[j] > probs[best]) best = j;
  }
  return static_cast<int>(best);
}

double accuracy(const QcnnArchitecture& arch, std::span<const double> theta, const Batch& batch,
                std::size_t classes) {
  check_classes(arch, classes);
  if (batch.empty()) throw std::invalid_argument("accuracy of an empty dataset");
  const FusedCircuit circuit(arch, theta);
  std::size_t correct = 0;
  for (const auto* e : batch) {
    if (predict_class(circuit.forward(e->state).probs, classes) == e->phase_index) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.size());
}

}  // namespace qcurriculum
