// Copyright 2026 The jumpgame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "jumpgame/jumpgame.hpp"

namespace {

using namespace jumpgame;

GameModel corpus_model(const std::string& name) {
  return parse_model(io::read_file(std::string(JUMPGAME_CORPUS_DIR) + "/" + name));
}

void BM_SolveMatrixGame(benchmark::State& state) {
  const auto size = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  std::vector<Matrix> games;
  for (int k = 0; k < 64; ++k) {
    Matrix M(size, size);
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) M(i, j) = unif(rng);
    }
    games.push_back(M);
  }
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_matrix_game(games[k++ % games.size()]));
  }
}
BENCHMARK(BM_SolveMatrixGame)->Arg(2)->Arg(4)->Arg(8);

void BM_ApplyG(benchmark::State& state) {
  const GameModel m = corpus_model("random_10_state.json");
  const auto grid = make_time_grid(m.partition, static_cast<std::size_t>(state.range(0)));
  const ValueGrid u0 = seed_u0(m, auto_certificate(m), grid);
  SolverOptions options;
  options.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(apply_G(m, u0, options));
}
BENCHMARK(BM_ApplyG)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ValueIterate(benchmark::State& state) {
  const GameModel m = corpus_model("random_10_state.json");
  const auto grid = make_time_grid(m.partition, static_cast<std::size_t>(state.range(0)));
  const auto cert = auto_certificate(m);
  SolverOptions options;
  options.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(value_iterate(m, cert, grid, options));
}
BENCHMARK(BM_ValueIterate)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_IsaacsBackward(benchmark::State& state) {
  const GameModel m = corpus_model("random_10_state.json");
  const auto grid = make_time_grid(m.partition, static_cast<std::size_t>(state.range(0)));
  SolverOptions options;
  options.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(isaacs_backward(m, grid, options));
}
BENCHMARK(BM_IsaacsBackward)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const GameModel m = corpus_model("ring_pursuit.json");
  const auto grid = make_time_grid(m.partition, 500);
  const auto policies = extract_policies(m, isaacs_backward(m, grid));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        monte_carlo(m, policies.maximizer, policies.minimizer, 0, 10000, 7, 1));
  }
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
