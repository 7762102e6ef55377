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

#include <algorithm>
#include <cmath>

#include "rawvae/audio.hpp"
#include "rawvae/error.hpp"

namespace rawvae {

void WindowSet::push_frame(std::span<const float> frame) {
  if (frame.size() != window_size_) {
    throw Error(ErrorCode::kShapeMismatch, "frame length differs from window size");
  }
  data_.insert(data_.end(), frame.begin(), frame.end());
}

AudioBuffer peak_normalize(const AudioBuffer& buffer) {
  float peak = 0.0f;
  for (float s : buffer.samples) peak = std::max(peak, std::abs(s));
  AudioBuffer out = buffer;
  if (peak == 0.0f || peak == 1.0f) return out;
  // Dividing (rather than multiplying by 1/peak) maps the peak sample to
  // exactly +-1, which makes a second pass the identity.
  for (float& s : out.samples) s /= peak;
  return out;
}

AudioBuffer resample(const AudioBuffer& buffer, int target_rate) {
  if (target_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "target sample rate must be positive");
  }
  if (target_rate == buffer.sample_rate) return buffer;

  const std::size_t in_len = buffer.size();
  const auto out_len = static_cast<std::size_t>(std::llround(
      static_cast<double>(in_len) * target_rate / buffer.sample_rate));
  AudioBuffer out;
  out.sample_rate = target_rate;
  out.source_label = buffer.source_label;
  out.samples.resize(out_len);
  if (in_len == 0) return out;

  const double ratio = static_cast<double>(buffer.sample_rate) / target_rate;
  for (std::size_t j = 0; j < out_len; ++j) {
    const double pos = static_cast<double>(j) * ratio;
    const auto i0 = std::min(static_cast<std::size_t>(pos), in_len - 1);
    const std::size_t i1 = std::min(i0 + 1, in_len - 1);
    const double frac = std::clamp(pos - static_cast<double>(i0), 0.0, 1.0);
    const double a = buffer.samples[i0];
    const double b = buffer.samples[i1];
    out.samples[j] = static_cast<float>(a + (b - a) * frac);
  }
  return out;
}

std::size_t window_count(std::size_t length, std::size_t window_size,
                         std::size_t hop) {
  if (window_size == 0 || hop == 0 || length < window_size) return 0;
  return (length - window_size) / hop + 1;
}

WindowSet window(const AudioBuffer& buffer, std::size_t window_size,
                 std::size_t hop) {
  if (window_size == 0 || hop == 0) {
    throw Error(ErrorCode::kInvalidArgument, "window size and hop must be >= 1");
  }
  if (buffer.size() < window_size) {
    throw Error(ErrorCode::kTooShort,
                "buffer of " + std::to_string(buffer.size()) +
                    " samples is shorter than one window of " +
                    std::to_string(window_size));
  }
  WindowSet out(window_size, hop, buffer.sample_rate);
  const std::size_t n = window_count(buffer.size(), window_size, hop);
  const std::span<const float> all(buffer.samples);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_frame(all.subspan(i * hop, window_size));
  }
  return out;
}

std::pair<AudioBuffer, AudioBuffer> truncate_pair(const AudioBuffer& a,
                                                  const AudioBuffer& b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot truncate an empty buffer");
  }
  if (a.sample_rate != b.sample_rate) {
    throw Error(ErrorCode::kRateMismatch,
                std::to_string(a.sample_rate) + " Hz vs " +
                    std::to_string(b.sample_rate) + " Hz");
  }
  const std::size_t n = std::min(a.size(), b.size());
  std::pair<AudioBuffer, AudioBuffer> out{a, b};
  out.first.samples.resize(n);
  out.second.samples.resize(n);
  return out;
}

AudioBuffer concatenate(std::span<const AudioBuffer> parts) {
  AudioBuffer out;
  if (parts.empty()) return out;
  out.sample_rate = parts.front().sample_rate;
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.sample_rate != out.sample_rate) {
      throw Error(ErrorCode::kRateMismatch, "cannot concatenate mixed sample rates");
    }
    total += p.size();
  }
  out.samples.reserve(total);
  for (const auto& p : parts) {
    out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
  }
  return out;
}

}  // namespace rawvae
