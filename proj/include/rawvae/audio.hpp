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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rawvae {

inline constexpr int kDefaultSampleRate = 44100;

// Mono float audio. Samples are expected in [-1, 1]; only peak_normalize
// enforces it.
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate = kDefaultSampleRate;
  std::optional<std::string> source_label;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Fixed-size frames sliced from one buffer, stored row-major.
class WindowSet {
 public:
  WindowSet(std::size_t window_size, std::size_t hop, int origin_sample_rate)
      : window_size_(window_size), hop_(hop), sample_rate_(origin_sample_rate) {}

  std::size_t count() const {
    return window_size_ == 0 ? 0 : data_.size() / window_size_;
  }
  std::size_t window_size() const { return window_size_; }
  std::size_t hop() const { return hop_; }
  int origin_sample_rate() const { return sample_rate_; }

  std::span<const float> frame(std::size_t i) const {
    return {data_.data() + i * window_size_, window_size_};
  }
  // All frames as one contiguous count() x window_size() matrix.
  std::span<const float> matrix() const { return data_; }

  void push_frame(std::span<const float> frame);

 private:
  std::size_t window_size_;
  std::size_t hop_;
  int sample_rate_;
  std::vector<float> data_;
};

enum class WavEncoding { kPcm16, kFloat32 };

AudioBuffer load_wav(const std::filesystem::path& path);
void save_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
              WavEncoding encoding);

AudioBuffer peak_normalize(const AudioBuffer& buffer);
AudioBuffer resample(const AudioBuffer& buffer, int target_rate);

// Frame i covers [i*hop, i*hop + window_size). Trailing samples that do not
// fill a whole frame are dropped.
WindowSet window(const AudioBuffer& buffer, std::size_t window_size,
                 std::size_t hop);
std::size_t window_count(std::size_t length, std::size_t window_size,
                         std::size_t hop);

// Cuts the longer buffer down to the shorter one's length, keeping its head.
std::pair<AudioBuffer, AudioBuffer> truncate_pair(const AudioBuffer& a,
                                                  const AudioBuffer& b);

AudioBuffer concatenate(std::span<const AudioBuffer> parts);

}  // namespace rawvae
