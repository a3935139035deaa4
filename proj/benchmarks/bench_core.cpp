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


#include <benchmark/benchmark.h>

#include <vector>

#include "qcurriculum/dense.hpp"
#include "qcurriculum/lie_algebra.hpp"
#include "qcurriculum/qcnn.hpp"
#include "qcurriculum/spin_models.hpp"

namespace {

using namespace qcurriculum;

LabeledExample cluster_example() {
  const ModelSpec spec = ModelSpec::cluster(8);
  return make_example(spec, Couplings{0.5, 1.5, 0.0}, PhaseTable::builtin(ModelFamily::Cluster));
}

void BM_Forward(benchmark::State& state) {
  const auto arch = build_qcnn(static_cast<QcnnVariant>(state.range(0)));
  const auto params = random_params(arch, 0);
  const auto example = cluster_example();
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(arch, params.theta, example.state));
  }
}
BENCHMARK(BM_Forward)->Arg(static_cast<int>(QcnnVariant::Full))
    ->Arg(static_cast<int>(QcnnVariant::Matchgate));

void BM_FusedForward(benchmark::State& state) {
  const auto arch = build_qcnn(QcnnVariant::Full);
  const auto params = random_params(arch, 0);
  const auto example = cluster_example();
  const FusedCircuit circuit(arch, params.theta);
  for (auto _ : state) benchmark::DoNotOptimize(circuit.forward(example.state));
}
BENCHMARK(BM_FusedForward);

void BM_ExampleGradient(benchmark::State& state) {
  const auto arch = build_qcnn(QcnnVariant::Full);
  const auto params = random_params(arch, 0);
  const auto example = cluster_example();
  for (auto _ : state) {
    benchmark::DoNotOptimize(example_gradient(arch, params.theta, example, 4));
  }
}
BENCHMARK(BM_ExampleGradient);

void BM_ExampleGradientGatewise(benchmark::State& state) {
  const auto arch = build_qcnn(QcnnVariant::Full);
  const auto params = random_params(arch, 0);
  const auto example = cluster_example();
  for (auto _ : state) {
    benchmark::DoNotOptimize(example_gradient_gatewise(arch, params.theta, example, 4));
  }
}
BENCHMARK(BM_ExampleGradientGatewise);

void BM_MatchgateClosure(benchmark::State& state) {
  const auto generators = matchgate_generators(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lie_closure(generators));
}
BENCHMARK(BM_MatchgateClosure)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_PgScore(benchmark::State& state) {
  const auto basis = lie_closure(matchgate_generators(8));
  const auto example = cluster_example();
  for (auto _ : state) benchmark::DoNotOptimize(pg_score(example.state, basis));
}
BENCHMARK(BM_PgScore)->Unit(benchmark::kMicrosecond);

void BM_GroundState(benchmark::State& state) {
  const auto h = build_cluster(static_cast<std::size_t>(state.range(0)), 0.5, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(ground_state(h));
}
BENCHMARK(BM_GroundState)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
