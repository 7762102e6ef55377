// Copyright 2026 The rawvae Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rawvae/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "rawvae/error.hpp"
#include "rawvae/latent.hpp"

namespace rawvae {

std::size_t bench_window_count(const VaeModel& model, double seconds) {
  const double samples = seconds * model.hyper().sample_rate;
  return static_cast<std::size_t>(
      std::ceil(samples / static_cast<double>(model.window_size())));
}

BenchReport run_decode_benchmark(const VaeModel& model, double seconds,
                                 std::size_t repetitions, std::uint64_t seed) {
  if (!(seconds > 0.0) || repetitions == 0) {
    throw Error(ErrorCode::kInvalidArgument, "benchmark needs a positive duration and repetitions");
  }
  BenchReport report;
  report.windows = bench_window_count(model, seconds);
  report.repetitions = repetitions;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<float>> means(report.windows,
                                        std::vector<float>(model.latent_dim()));
  for (auto& m : means) {
    for (float& v : m) v = static_cast<float>(normal(rng));
  }
  const auto& stds = means;  // ignored in mean-only mode
  const auto mode = SynthesisMode::mean_only();

  constexpr int kWarmup = 3;
  for (int i = 0; i < kWarmup; ++i) decode_path(model, means, stds, mode);

  using Clock = std::chrono::steady_clock;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto t0 = Clock::now();
    const AudioBuffer out = decode_path(model, means, stds, mode);
    const auto t1 = Clock::now();
    if (out.size() != report.windows * model.window_size()) {
      throw Error(ErrorCode::kShapeMismatch, "benchmark decoded an unexpected length");
    }
    report.samples_ms.push_back(
        std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  auto sorted = report.samples_ms;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  report.median_ms = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  report.p95_ms = sorted[std::max<std::size_t>(rank, 1) - 1];
  return report;
}

}  // namespace rawvae
