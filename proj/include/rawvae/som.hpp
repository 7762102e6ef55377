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

// Kohonen self-organizing map over audio thumbnails.
//
// Features are standardized (zero mean, unit variance per dimension) before
// training; the standardization is stored with the map and applied to every
// query. Prototypes live in standardized space.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rawvae/audio.hpp"
#include "rawvae/features.hpp"

namespace rawvae {

struct SomTrainParams {
  std::size_t width = 2;
  std::size_t height = 2;
  int epochs = 100;
  double learning_rate = 0.5;
  // Starting neighbourhood radius in grid units; 0 picks max(width, height) / 2
  // (at least 1).
  double radius = 0.0;
  double final_radius = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const SomTrainParams&) const = default;
};

struct GridUnit {
  std::size_t x = 0;
  std::size_t y = 0;

  bool operator==(const GridUnit&) const = default;
};

struct SomMap {
  static constexpr int kFormatVersion = 1;

  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t dim = 0;
  std::vector<float> prototypes;  // (y * width + x) * dim
  std::vector<float> feature_mean;
  std::vector<float> feature_scale;
  SomTrainParams training;
  ThumbnailConfig feature_config;
  // Quantization error after each epoch, then once more after the final
  // convergence pass.
  std::vector<float> quantization_error;

  std::span<const float> prototype(std::size_t x, std::size_t y) const {
    return {prototypes.data() + (y * width + x) * dim, dim};
  }
  std::vector<float> standardize(std::span<const double> features) const;

  bool operator==(const SomMap&) const = default;
};

struct Cluster {
  GridUnit unit;
  std::vector<std::string> members;
};

// max(2, round(sqrt(5 * sqrt(n)))) units per side.
std::size_t default_grid_side(std::size_t thumbnail_count);

// Online training, one update per presented thumbnail: find the best-matching
// unit, move every prototype toward the sample by lr * exp(-d^2 / (2 r^2)).
// lr and r decay exponentially per epoch from (learning_rate, radius) to
// (0.01 * learning_rate, final_radius). A final batch pass then sets each
// prototype to the neighbourhood-weighted mean of the data at final_radius.
SomMap train_som(std::span<const Thumbnail> thumbnails, const SomTrainParams& params);
// Same, on raw feature vectors.
SomMap train_som(std::span<const std::vector<double>> features,
                 const SomTrainParams& params,
                 const ThumbnailConfig& feature_config = {});

// Ties go to the smallest (y, x).
GridUnit best_matching_unit(const SomMap& map, std::span<const double> features);
GridUnit best_matching_unit_standardized(const SomMap& map,
                                         std::span<const float> standardized);

// Mean Euclidean distance from each sample to its best-matching prototype.
double quantization_error(const SomMap& map,
                          std::span<const std::vector<double>> features);

// Non-empty units only, largest first; ties by (y, x).
std::vector<Cluster> assign_clusters(const SomMap& map,
                                     std::span<const Thumbnail> thumbnails);

using AudioLoader = std::function<AudioBuffer(const std::string& file_ref)>;

// Members in lexicographic order, end to end. Throws EmptyInput on an empty
// cluster and RateMismatch if the loader returns mixed rates.
AudioBuffer concatenate_cluster(const Cluster& cluster, const AudioLoader& loader);

// The 10-30 s span that suits meso-scale interpolation inputs.
bool in_meso_duration_band(const AudioBuffer& buffer);

void save_som(const SomMap& map, const std::filesystem::path& path);
SomMap load_som(const std::filesystem::path& path);

// One line per cluster: "x,y: file1;file2;..."
void write_clusters(std::span<const Cluster> clusters, std::ostream& out);

}  // namespace rawvae
