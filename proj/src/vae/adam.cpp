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

#include "rawvae/adam.hpp"

#include <cmath>

#include "rawvae/error.hpp"
#include "rawvae/simd/kernels.hpp"

namespace rawvae {

template <typename T>
BasicAdamState<T>::BasicAdamState(const BasicVaeModel<T>& model) {
  for (const auto& p : model.parameters()) {
    first_moment.emplace_back(p.size(), T(0));
    second_moment.emplace_back(p.size(), T(0));
  }
}

template <typename T>
void adam_step(std::span<const std::span<T>> params,
               std::span<const std::span<const T>> grads, BasicAdamState<T>& state,
               double learning_rate, const AdamConfig& config) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size()) {
    throw Error(ErrorCode::kShapeMismatch, "adam: tensor count mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const simd::AdamCoefficients<T> coeff{
      static_cast<T>(learning_rate),
      static_cast<T>(config.beta1),
      static_cast<T>(config.beta2),
      static_cast<T>(config.epsilon),
      static_cast<T>(1.0 - std::pow(config.beta1, t)),
      static_cast<T>(1.0 - std::pow(config.beta2, t)),
  };
  const auto& k = simd::kernels<T>();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::size_t n = params[i].size();
    if (grads[i].size() != n || state.first_moment[i].size() != n ||
        state.second_moment[i].size() != n) {
      throw Error(ErrorCode::kShapeMismatch, "adam: tensor size mismatch");
    }
    k.adam_update(params[i].data(), grads[i].data(), state.first_moment[i].data(),
                  state.second_moment[i].data(), n, coeff);
  }
}

template <typename T>
void adam_step(BasicVaeModel<T>& model, const BasicVaeModel<T>& grads,
               BasicAdamState<T>& state, double learning_rate,
               const AdamConfig& config) {
  const auto params = model.parameters();
  const auto g = grads.parameters();
  adam_step<T>(std::span<const std::span<T>>(params),
               std::span<const std::span<const T>>(g), state, learning_rate, config);
}

template struct BasicAdamState<float>;
template struct BasicAdamState<double>;
template void adam_step<float>(std::span<const std::span<float>>,
                               std::span<const std::span<const float>>,
                               BasicAdamState<float>&, double, const AdamConfig&);
template void adam_step<double>(std::span<const std::span<double>>,
                                std::span<const std::span<const double>>,
                                BasicAdamState<double>&, double, const AdamConfig&);
template void adam_step<float>(BasicVaeModel<float>&, const BasicVaeModel<float>&,
                               BasicAdamState<float>&, double, const AdamConfig&);
template void adam_step<double>(BasicVaeModel<double>&, const BasicVaeModel<double>&,
                                BasicAdamState<double>&, double, const AdamConfig&);

}  // namespace rawvae
