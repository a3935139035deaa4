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

#include "qcurriculum/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "qcurriculum/curriculum.hpp"
#include "qcurriculum/parallel.hpp"
#include "qcurriculum/random.hpp"

namespace qcurriculum {

namespace {

constexpr std::uint64_t kProfileStream = 0x70726f66ULL;   // "prof"
constexpr std::uint64_t kFeatureStream = 0x66656174ULL;   // "feat"
constexpr std::uint64_t kTeacherStream = 0x74656163ULL;   // "teac"
constexpr std::uint64_t kStartStream = 0x7374617274ULL;   // "start"
constexpr std::uint64_t kSgdStream = 0x736764ULL;         // "sgd"

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return s;
}

/// sum_b w_b G_b / sum_b w_b.
// Equality cases (flat profiles, identical data) differ only by rounding.
constexpr double kRoundingSlack = 1e-12;

double weighted_mean(std::span<const double> weights, std::span<const double> values) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t b = 0; b < weights.size(); ++b) {
    if (weights[b] == 0.0) continue;
    num += weights[b] * values[b];
    den += weights[b];
  }
  return den > 0.0 ? num / den : 0.0;
}

double subset_mean(std::span<const double> values, std::span<const std::size_t> subset) {
  double total = 0.0;
  for (const std::size_t i : subset) total += values[i];
  return total / static_cast<double>(subset.size());
}

struct Linear {
  const std::vector<std::vector<double>>& x;
  std::span<const double> y;

  double residual(const std::vector<double>& w, std::size_t i) const {
    double r = -y[i];
    for (std::size_t k = 0; k < w.size(); ++k) r += w[k] * x[i][k];
    return r;
  }
  std::vector<double> grad(const std::vector<double>& w, std::size_t i) const {
    const double r = residual(w, i);
    std::vector<double> g(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) g[k] = r * x[i][k];
    return g;
  }
  double risk(const std::vector<double>& w) const {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = residual(w, i);
      total += 0.5 * r * r;
    }
    return total / static_cast<double>(x.size());
  }
  std::vector<std::vector<double>> grads(const std::vector<double>& w,
                                         std::span<const std::size_t> idx) const {
    std::vector<std::vector<double>> out;
    out.reserve(idx.size());
    for (const std::size_t i : idx) out.push_back(grad(w, i));
    return out;
  }
  /// Per-example |g_i - mean g|^2 over the full set.
  std::vector<double> contributions(const std::vector<double>& w) const {
    std::vector<std::size_t> all(x.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto g = grads(w, all);
    std::vector<double> mean(w.size(), 0.0);
    for (const auto& gi : g) {
      for (std::size_t k = 0; k < w.size(); ++k) mean[k] += gi[k];
    }
    for (auto& m : mean) m /= static_cast<double>(g.size());
    std::vector<double> c(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) s += (g[i][k] - mean[k]) * (g[i][k] - mean[k]);
      c[i] = s;
    }
    return c;
  }
  void sgd_step(std::vector<double>& w, std::span<const std::size_t> batch, double lr) const {
    std::vector<double> step(w.size(), 0.0);
    for (const std::size_t i : batch) {
      const double r = residual(w, i);
      for (std::size_t k = 0; k < w.size(); ++k) step[k] += r * x[i][k];
    }
    const double scale = lr / static_cast<double>(batch.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] -= scale * step[k];
  }
};

}  // namespace

bool GradientProfile::non_increasing() const {
  bool seen = false;
  double last = 0.0;
  for (std::size_t b = 0; b < bin_mean.size(); ++b) {
    if (bin_count[b] == 0) continue;
    if (seen && bin_mean[b] > last) return false;
    last = bin_mean[b];
    seen = true;
  }
  return true;
}

GradientProfile profile_from_values(std::span<const double> scores,
                                    std::span<const double> example_mean, std::size_t bins,
                                    std::size_t draws_per_example, std::size_t min_samples) {
  if (scores.empty() || scores.size() != example_mean.size()) {
    throw std::invalid_argument("profile needs one value per scored example");
  }
  if (bins == 0) throw std::invalid_argument("profile needs at least one bin");
  GradientProfile p;
  p.scores.assign(scores.begin(), scores.end());
  p.example_mean.assign(example_mean.begin(), example_mean.end());
  p.param_samples = draws_per_example;
  p.min_samples = min_samples;
  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  // A constant score leaves a single effective bin.
  const std::size_t used = hi > lo ? bins : 1;
  p.bin_edges.resize(used + 1);
  for (std::size_t b = 0; b <= used; ++b) {
    p.bin_edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(used);
  }
  p.bin_edges.back() = hi;
  p.bin_mean.assign(used, 0.0);
  p.bin_count.assign(used, 0);
  p.bin_examples.assign(used, 0);
  std::vector<double> sums(used, 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::size_t b = 0;
    if (hi > lo) {
      b = static_cast<std::size_t>((scores[i] - lo) / (hi - lo) * static_cast<double>(used));
      b = std::min(b, used - 1);
    }
    sums[b] += example_mean[i];
    ++p.bin_examples[b];
    p.bin_count[b] += draws_per_example;
  }
  p.cdf.resize(used);
  std::size_t cumulative = 0;
  for (std::size_t b = 0; b < used; ++b) {
    if (p.bin_examples[b] > 0) p.bin_mean[b] = sums[b] / static_cast<double>(p.bin_examples[b]);
    p.low_confidence.push_back(p.bin_count[b] < min_samples);
    cumulative += p.bin_examples[b];
    p.cdf[b] = static_cast<double>(cumulative) / static_cast<double>(scores.size());
  }
  p.cdf.back() = 1.0;
  return p;
}

GradientProfile estimate_G(const QcnnArchitecture& arch, std::span<const LabeledExample> examples,
                           std::span<const double> scores, std::size_t classes,
                           const EstimateOptions& options) {
  if (options.param_samples < 30) {
    throw std::invalid_argument("estimate_G needs at least 30 parameter samples");
  }
  if (examples.empty() || scores.size() != examples.size()) {
    throw std::invalid_argument("estimate_G needs one score per example");
  }
  // per_sample[s][i] = |grad l_i(theta_s)|^2
  std::vector<std::vector<double>> per_sample(options.param_samples);
  parallel_for(options.param_samples, options.jobs, [&](std::size_t s) {
    const auto theta = random_params(arch, derive_seed(options.seed, kProfileStream, s)).theta;
    const FusedCircuit circuit(arch, theta);
    auto& row = per_sample[s];
    row.resize(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
      row[i] = norm2(circuit.gradient(examples[i], classes).gradient);
    }
  });
  std::vector<double> mean(examples.size(), 0.0);
  for (const auto& row : per_sample) {
    for (std::size_t i = 0; i < row.size(); ++i) mean[i] += row[i];
  }
  for (auto& m : mean) m /= static_cast<double>(options.param_samples);
  return profile_from_values(scores, mean, options.bins, options.param_samples,
                             options.min_samples);
}

Prop1Report prop1_check(const GradientProfile& profile, std::span<const double> fractions) {
  Prop1Report report;
  report.hypothesis_non_increasing = profile.non_increasing();
  std::vector<double> counts(profile.bins());
  double total = 0.0;
  for (std::size_t b = 0; b < profile.bins(); ++b) {
    counts[b] = static_cast<double>(profile.bin_examples[b]);
    total += counts[b];
    if (profile.bin_examples[b] == 0) report.empty_bins.push_back(b);
  }
  report.conclusion_all_fractions = true;
  for (const double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw std::invalid_argument(fmt::format("fraction {} outside (0, 1]", f));
    }
    // Lowest-score mass f * N, walking bins upward.
    std::vector<double> weights(profile.bins(), 0.0);
    double remaining = f * total;
    for (std::size_t b = 0; b < profile.bins() && remaining > 0.0; ++b) {
      weights[b] = std::min(counts[b], remaining);
      remaining -= weights[b];
    }
    Prop1Row row;
    row.fraction = f;
    row.subset_mean = weighted_mean(weights, profile.bin_mean);
    row.full_mean = weighted_mean(counts, profile.bin_mean);
    row.ratio = row.full_mean > 0.0 ? row.subset_mean / row.full_mean : 1.0;
    row.holds = row.subset_mean >= row.full_mean - kRoundingSlack * std::abs(row.full_mean);
    report.conclusion_all_fractions = report.conclusion_all_fractions && row.holds;
    report.rows.push_back(row);
  }
  return report;
}

double gradient_variance(std::span<const std::vector<double>> g) {
  if (g.empty()) throw std::invalid_argument("gradient variance of an empty subset");
  const std::size_t d = g.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& gi : g) {
    if (gi.size() != d) throw std::invalid_argument("gradient length mismatch");
    for (std::size_t k = 0; k < d; ++k) mean[k] += gi[k];
  }
  for (auto& m : mean) m /= static_cast<double>(g.size());
  double total = 0.0;
  for (const auto& gi : g) {
    for (std::size_t k = 0; k < d; ++k) total += (gi[k] - mean[k]) * (gi[k] - mean[k]);
  }
  return total / static_cast<double>(g.size());
}

double gradient_variance(const QcnnArchitecture& arch, std::span<const double> theta,
                         const Batch& subset, std::size_t classes) {
  if (subset.empty()) throw std::invalid_argument("gradient variance of an empty subset");
  const FusedCircuit circuit(arch, theta);
  std::vector<std::vector<double>> g;
  g.reserve(subset.size());
  for (const auto* e : subset) g.push_back(circuit.gradient(*e, classes).gradient);
  return gradient_variance(g);
}

std::vector<std::vector<double>> surrogate_features(std::span<const LabeledExample> examples,
                                                    std::uint64_t seed) {
  if (examples.empty()) throw std::invalid_argument("surrogate needs examples");
  const std::size_t n = examples.front().state.num_qubits();
  const auto arch = build_qcnn(QcnnVariant::Full);
  const auto theta = random_params(arch, derive_seed(seed, kFeatureStream)).theta;
  const FusedCircuit circuit(arch, theta);
  std::vector<PauliTerm> probes;
  for (std::size_t i = 0; i < n; ++i) probes.push_back(PauliTerm::on(n, {{i, Pauli::Z}}));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    probes.push_back(PauliTerm::on(n, {{i, Pauli::X}, {i + 1, Pauli::X}}));
  }
  std::vector<std::vector<double>> features;
  features.reserve(examples.size());
  for (const auto& e : examples) {
    const auto out = StateVector::unchecked(n, circuit.evolve(e.state));
    std::vector<double> f{1.0};
    for (const auto& p : probes) f.push_back(expectation(p, out).real());
    features.push_back(std::move(f));
  }
  return features;
}

Prop2Report prop2_toy_check(std::span<const LabeledExample> examples, const Prop2Options& options) {
  const auto features = surrogate_features(examples, options.seed);
  Rng teacher_rng(derive_seed(options.seed, kTeacherStream));
  std::vector<double> teacher(features.front().size());
  for (auto& w : teacher) w = teacher_rng.uniform(-1.0, 1.0);
  std::vector<double> targets(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    double y = 0.0;
    for (std::size_t k = 0; k < teacher.size(); ++k) y += teacher[k] * features[i][k];
    targets[i] = y;
  }
  auto report = prop2_toy_check(features, targets, options);
  report.surrogate = fmt::format(
      "linear readout, loss 0.5 (w.phi - y)^2; phi = (1, <Z_i>, <X_i X_i+1>) after a frozen "
      "random full QCNN circuit (feature seed {}); y from a uniform(-1, 1) teacher; constant-rate "
      "SGD; A: lowest gradient-variance contribution first, linear pacing p0 = L/N, saturating "
      "at 0.8 T; B: uniform over the full set",
      options.seed);
  return report;
}

Prop2Report prop2_toy_check(const std::vector<std::vector<double>>& features,
                            std::span<const double> targets, const Prop2Options& options) {
  if (features.empty() || features.size() != targets.size()) {
    throw std::invalid_argument("prop2 toy needs one target per feature vector");
  }
  if (options.seeds == 0 || options.epochs == 0 || options.steps_per_epoch == 0 ||
      options.minibatch == 0) {
    throw std::invalid_argument("prop2 toy needs positive seeds, epochs, steps and minibatch");
  }
  const std::size_t n = features.size();
  const std::size_t d = features.front().size();
  const Linear model{features, targets};
  double smoothness = 0.0;
  for (const auto& f : features) smoothness = std::max(smoothness, norm2(f));
  const double lr = smoothness > 0.0 ? 0.5 / smoothness : 1.0;

  PresetOptions pacing_options;
  pacing_options.dataset_size = n;
  pacing_options.minibatch = options.minibatch;
  pacing_options.epochs = options.epochs;
  const PacingFn pacing = default_pacing(pacing_options);

  Prop2Report r;
  r.seeds = options.seeds;
  r.epochs = options.epochs;
  r.examples = n;
  r.features = d;
  r.learning_rate = lr;
  r.sigma2_curriculum.assign(options.epochs, 0.0);
  r.sigma2_curriculum_initial.assign(options.epochs, 0.0);
  r.sigma2_random.assign(options.epochs, 0.0);
  r.risk_trace_curriculum.assign(options.epochs, 0.0);
  r.risk_trace_random.assign(options.epochs, 0.0);

  std::vector<std::size_t> everything(n);
  std::iota(everything.begin(), everything.end(), std::size_t{0});

  for (std::size_t s = 0; s < options.seeds; ++s) {
    Rng start(derive_seed(options.seed, kStartStream, s));
    std::vector<double> w0(d);
    for (auto& w : w0) w = start.uniform(-1.0, 1.0);
    auto wa = w0;
    auto wb = w0;
    Rng rng_a(derive_seed(options.seed, kSgdStream, 2 * s));
    Rng rng_b(derive_seed(options.seed, kSgdStream, 2 * s + 1));
    const auto initial_contrib = model.contributions(w0);
    for (std::size_t t = 1; t <= options.epochs; ++t) {
      const double fraction = pace(pacing, t, options.epochs);
      const auto contrib = model.contributions(wa);
      const auto avail_a =
          select_available(contrib, Ordering::Ascending, fraction, options.minibatch);
      const auto avail_0 =
          select_available(initial_contrib, Ordering::Ascending, fraction, options.minibatch);
      // Deviations are taken from the full-set risk gradient on both sides.
      r.sigma2_curriculum[t - 1] += subset_mean(contrib, avail_a);
      r.sigma2_curriculum_initial[t - 1] += subset_mean(initial_contrib, avail_0);
      r.sigma2_random[t - 1] += gradient_variance(model.grads(wb, everything));
      for (std::size_t k = 0; k < options.steps_per_epoch; ++k) {
        model.sgd_step(wa, draw_minibatch(avail_a, options.minibatch, rng_a), lr);
        model.sgd_step(wb, draw_minibatch(everything, options.minibatch, rng_b), lr);
      }
      r.risk_trace_curriculum[t - 1] += model.risk(wa);
      r.risk_trace_random[t - 1] += model.risk(wb);
    }
    r.risk_curriculum.push_back(model.risk(wa));
    r.risk_random.push_back(model.risk(wb));
  }
  const auto seeds = static_cast<double>(options.seeds);
  for (std::size_t t = 0; t < options.epochs; ++t) {
    r.sigma2_curriculum[t] /= seeds;
    r.sigma2_curriculum_initial[t] /= seeds;
    r.sigma2_random[t] /= seeds;
    r.risk_trace_curriculum[t] /= seeds;
    r.risk_trace_random[t] /= seeds;
    const double allowed = r.sigma2_random[t] + kRoundingSlack * (1.0 + r.sigma2_random[t]);
    if (r.sigma2_curriculum[t] > allowed) {
      r.premise_failures.push_back(t + 1);
    }
  }
  r.premise_holds = r.premise_failures.empty();
  double diff_mean = 0.0;
  for (std::size_t s = 0; s < options.seeds; ++s) {
    r.mean_risk_curriculum += r.risk_curriculum[s];
    r.mean_risk_random += r.risk_random[s];
    diff_mean += r.risk_curriculum[s] - r.risk_random[s];
  }
  r.mean_risk_curriculum /= seeds;
  r.mean_risk_random /= seeds;
  diff_mean /= seeds;
  if (options.seeds > 1) {
    double ss = 0.0;
    for (std::size_t s = 0; s < options.seeds; ++s) {
      const double dlt = r.risk_curriculum[s] - r.risk_random[s] - diff_mean;
      ss += dlt * dlt;
    }
    r.sem_difference = std::sqrt(ss / (seeds - 1.0)) / std::sqrt(seeds);
  }
  r.ordering_holds = r.mean_risk_curriculum <= r.mean_risk_random + r.sem_difference;
  return r;
}

}  // namespace qcurriculum
