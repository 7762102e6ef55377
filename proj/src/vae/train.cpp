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

#include "rawvae/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rawvae/error.hpp"

namespace rawvae {

Checkpoint train(std::span<const WindowSet> dataset, const VaeHyperParams& hyper,
                 const EpochCallback& on_epoch) {
  hyper.validate();
  std::vector<float> frames;
  for (const auto& set : dataset) {
    if (set.count() == 0) continue;
    if (set.window_size() != hyper.window_size) {
      throw Error(ErrorCode::kShapeMismatch,
                  "dataset window size " + std::to_string(set.window_size()) +
                      " differs from model window size " +
                      std::to_string(hyper.window_size));
    }
    const auto m = set.matrix();
    frames.insert(frames.end(), m.begin(), m.end());
  }
  const std::size_t width = hyper.window_size;
  const std::size_t total = frames.size() / width;
  if (total == 0) throw Error(ErrorCode::kEmptyDataset, "no training windows");

  std::mt19937_64 rng(hyper.seed);
  Checkpoint ckpt;
  ckpt.model = VaeModel::initialized(hyper, rng);
  ckpt.adam = AdamState(ckpt.model);
  VaeModel grads(hyper);
  Workspace<float> ws;

  const std::size_t latent = hyper.latent_dim;
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<float> batch;
  std::vector<float> eps;
  std::normal_distribution<double> normal(0.0, 1.0);

  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double recon_sum = 0.0;
    double kl_sum = 0.0;
    for (std::size_t start = 0; start < total; start += hyper.batch_size) {
      const std::size_t n = std::min(hyper.batch_size, total - start);
      batch.resize(n * width);
      for (std::size_t i = 0; i < n; ++i) {
        const float* src = frames.data() + order[start + i] * width;
        std::copy(src, src + width, batch.begin() + static_cast<std::ptrdiff_t>(i * width));
      }
      eps.resize(n * latent);
      for (float& e : eps) e = static_cast<float>(normal(rng));

      const LossTerms terms = backward<float>(ckpt.model, batch, eps, n, hyper.alpha,
                                              ws, grads);
      if (!std::isfinite(terms.total)) {
        throw Error(ErrorCode::kNumericFailure,
                    "non-finite loss in epoch " + std::to_string(epoch));
      }
      adam_step(ckpt.model, grads, ckpt.adam, hyper.learning_rate);
      recon_sum += terms.recon * static_cast<double>(n);
      kl_sum += terms.kl * static_cast<double>(n);
    }
    const EpochLoss loss{static_cast<float>(recon_sum / static_cast<double>(total)),
                         static_cast<float>(kl_sum / static_cast<double>(total))};
    if (!std::isfinite(loss.recon) || !std::isfinite(loss.kl) ||
        !ckpt.model.all_finite()) {
      throw Error(ErrorCode::kNumericFailure,
                  "non-finite state after epoch " + std::to_string(epoch));
    }
    ckpt.loss_history.push_back(loss);
    if (on_epoch) on_epoch(epoch, loss);
  }
  return ckpt;
}

}  // namespace rawvae
