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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rawvae/vae.hpp"

namespace rawvae {

struct BenchReport {
  std::size_t windows = 0;
  std::size_t repetitions = 0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  std::vector<double> samples_ms;
};

// ceil(seconds * rate / window_size) windows for the model's rate.
std::size_t bench_window_count(const VaeModel& model, double seconds);

// Times decode_path (mean only) over random latents after warm-up runs.
BenchReport run_decode_benchmark(const VaeModel& model, double seconds,
                                 std::size_t repetitions, std::uint64_t seed);

}  // namespace rawvae
