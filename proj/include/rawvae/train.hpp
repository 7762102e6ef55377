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
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "rawvae/adam.hpp"
#include "rawvae/audio.hpp"
#include "rawvae/vae.hpp"

namespace rawvae {

struct EpochLoss {
  float recon = 0.0f;
  float kl = 0.0f;

  bool operator==(const EpochLoss&) const = default;
};

struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  VaeModel model;
  AdamState adam;
  std::vector<EpochLoss> loss_history;

  const VaeHyperParams& hyper() const { return model.hyper(); }
  bool operator==(const Checkpoint&) const = default;
};

// Called after every epoch with the 1-based epoch number.
using EpochCallback = std::function<void(int epoch, const EpochLoss& loss)>;

// Shuffles the windows every epoch with a generator seeded from hyper.seed,
// draws fresh noise per window per visit, and takes one Adam step per batch.
// Throws EmptyDataset, ShapeMismatch, or NumericFailure on a non-finite loss.
Checkpoint train(std::span<const WindowSet> dataset, const VaeHyperParams& hyper,
                 const EpochCallback& on_epoch = {});

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::vector<std::uint8_t> bytes);

}  // namespace rawvae
