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

#include <cstdint>
#include <span>
#include <vector>

#include "rawvae/vae.hpp"

namespace rawvae {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moments per parameter tensor, in the model's canonical order.
template <typename T>
struct BasicAdamState {
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;
  std::uint64_t step = 0;

  BasicAdamState() = default;
  explicit BasicAdamState(const BasicVaeModel<T>& model);

  bool operator==(const BasicAdamState&) const = default;
};

using AdamState = BasicAdamState<float>;

// One bias-corrected Adam update over every tensor; increments state.step.
template <typename T>
void adam_step(std::span<const std::span<T>> params,
               std::span<const std::span<const T>> grads, BasicAdamState<T>& state,
               double learning_rate, const AdamConfig& config = {});

template <typename T>
void adam_step(BasicVaeModel<T>& model, const BasicVaeModel<T>& grads,
               BasicAdamState<T>& state, double learning_rate,
               const AdamConfig& config = {});

}  // namespace rawvae
