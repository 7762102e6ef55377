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

// Latent paths and the three interpolation strategies between two recordings:
// stepwise (a fixed blend per segment), meso-scale (a per-window curve) and
// extended (per-window curve over overlapped slices, which stretches time by
// window_size / hop).
//
// Blend weight c always multiplies the first input: c = 1 reproduces input
// one, c = 0 reproduces input two. Means and standard deviations are blended
// linearly; blended deviations are floored at kMinBlendedStd.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rawvae/audio.hpp"
#include "rawvae/vae.hpp"

namespace rawvae {

inline constexpr float kMinBlendedStd = 1e-6f;

struct LatentPath {
  std::vector<LatentStats> stats;
  std::size_t window_size = 0;
  std::size_t hop = 0;
  std::size_t latent_dim = 0;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const { return stats.size(); }
};

struct ConstantCurve {
  double value = 0.0;
};
struct LinearCurve {
  double from = 0.0;
  double to = 1.0;
};
struct SineCurve {
  double period = 32.0;  // in windows
  double phase = 0.0;    // radians
  double amplitude = 1.0;
  double offset = 0.0;
};
struct BreakpointCurve {
  std::vector<std::pair<double, double>> points;  // (window index, value)
};
using CurveSpec = std::variant<ConstantCurve, LinearCurve, SineCurve, BreakpointCurve>;

// Text forms: "const:1.0", "lin:0:1", "sine:p=32,ph=0,a=1,o=0",
// "bp:0=0,10=1,20=0". Throws EmptySpec or InvalidArgument.
CurveSpec parse_curve_spec(std::string_view text);
std::string to_string(const CurveSpec& spec);

// Per-window blend weights, clamped to [-1, 1] on construction.
class InterpolationCurve {
 public:
  explicit InterpolationCurve(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
};

InterpolationCurve generate_curve(const CurveSpec& spec, std::size_t length);

struct SynthesisMode {
  enum class Kind { kSampled, kMeanOnly };
  Kind kind = Kind::kSampled;
  std::uint64_t seed = 0;

  static SynthesisMode sampled(std::uint64_t seed) { return {Kind::kSampled, seed}; }
  static SynthesisMode mean_only() { return {Kind::kMeanOnly, 0}; }
};

// Mean and deviation vectors ready for decoding.
struct BlendedPath {
  std::vector<std::vector<float>> means;
  std::vector<std::vector<float>> stds;

  std::size_t size() const { return means.size(); }
  void append(const BlendedPath& other);
};

// Resamples to the model rate if needed, then windows and encodes.
LatentPath encode_audio(const VaeModel& model, const AudioBuffer& buffer,
                        std::size_t hop);

// weights[i] multiplies window i of `a`; (1 - weights[i]) multiplies `b`.
BlendedPath blend_paths(const LatentPath& a, const LatentPath& b,
                        std::span<const double> weights);
// The path's own means and deviations (exp(logvar / 2)).
BlendedPath as_blended(const LatentPath& path);

// Decodes each window and concatenates the frames. With crossfade > 0,
// consecutive frames overlap by that many samples under a linear fade.
AudioBuffer decode_path(const VaeModel& model,
                        std::span<const std::vector<float>> means,
                        std::span<const std::vector<float>> stds,
                        const SynthesisMode& mode, std::size_t crossfade = 0);

// floor(range / step) + 1, tolerant of round-off in the division.
std::size_t stepwise_segment_count(double range, double step);

AudioBuffer stepwise_interpolate(const VaeModel& model, const AudioBuffer& a,
                                 const AudioBuffer& b, double range, double step,
                                 const SynthesisMode& mode,
                                 std::size_t crossfade = 0);

AudioBuffer meso_interpolate(const VaeModel& model, const AudioBuffer& a,
                             const AudioBuffer& b, const InterpolationCurve& curve,
                             const SynthesisMode& mode, std::size_t crossfade = 0);

AudioBuffer extended_interpolate(const VaeModel& model, const AudioBuffer& a,
                                 const AudioBuffer& b,
                                 const InterpolationCurve& curve, std::size_t hop,
                                 const SynthesisMode& mode,
                                 std::size_t crossfade = 0);

// Window counts the curve must match for meso / extended synthesis.
std::size_t meso_window_count(const VaeModel& model, const AudioBuffer& a,
                              const AudioBuffer& b);
std::size_t extended_window_count(const VaeModel& model, const AudioBuffer& a,
                                  const AudioBuffer& b, std::size_t hop);

// CSV: "idx,mu_0..mu_{M-1},lv_0..lv_{M-1}" then one row per window.
void write_latents(const LatentPath& path, std::ostream& out);
void export_latents(const LatentPath& path, const std::filesystem::path& file);

}  // namespace rawvae
