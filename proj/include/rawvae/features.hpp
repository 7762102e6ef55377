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

// Bag-of-frames audio thumbnails: per analysis frame, mel-frequency cepstral
// coefficients plus optional spectral centroid and RMS energy; the thumbnail
// is the per-feature means followed by the per-feature standard deviations.

#include <cstddef>
#include <string>
#include <vector>

#include "rawvae/audio.hpp"

namespace rawvae {

struct ThumbnailConfig {
  std::size_t frame_size = 2048;
  std::size_t hop = 1024;
  std::size_t n_mels = 40;
  std::size_t n_mfcc = 13;
  bool centroid = true;
  bool rms = true;

  std::size_t features_per_frame() const {
    return n_mfcc + (centroid ? 1 : 0) + (rms ? 1 : 0);
  }
  std::size_t dimension() const { return 2 * features_per_frame(); }

  void validate() const;
  // Compact "frame=2048,hop=1024,mels=40,mfcc=13,centroid=1,rms=1" form.
  std::string to_string() const;
  static ThumbnailConfig parse(const std::string& text);

  bool operator==(const ThumbnailConfig&) const = default;
};

struct Thumbnail {
  std::vector<double> features;
  std::string file_ref;
  ThumbnailConfig config;
};

// One row of features_per_frame() values per analysis frame. Throws TooShort
// when the buffer is shorter than one frame.
std::vector<std::vector<double>> frame_features(const AudioBuffer& buffer,
                                                const ThumbnailConfig& config);

Thumbnail extract_thumbnail(const AudioBuffer& buffer,
                            const ThumbnailConfig& config = {},
                            std::string file_ref = {});

}  // namespace rawvae
