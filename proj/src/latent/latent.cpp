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

#include "rawvae/latent.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>

#include "rawvae/error.hpp"

namespace rawvae {
namespace {

// Bounds workspace memory for long inputs. Results do not depend on it.
constexpr std::size_t kChunkWindows = 256;

AudioBuffer at_model_rate(const VaeModel& model, const AudioBuffer& buffer) {
  const int rate = model.hyper().sample_rate;
  return buffer.sample_rate == rate ? buffer : resample(buffer, rate);
}

std::pair<AudioBuffer, AudioBuffer> prepared_pair(const VaeModel& model,
                                                  const AudioBuffer& a,
                                                  const AudioBuffer& b) {
  return truncate_pair(at_model_rate(model, a), at_model_rate(model, b));
}

void check_curve(const InterpolationCurve& curve, std::size_t windows) {
  if (curve.size() != windows) {
    throw Error(ErrorCode::kCurveLengthMismatch,
                "curve has " + std::to_string(curve.size()) + " values for " +
                    std::to_string(windows) + " windows");
  }
}

void append_frame(std::vector<float>& out, std::span<const float> frame,
                  std::size_t crossfade, bool first) {
  if (first || crossfade == 0) {
    out.insert(out.end(), frame.begin(), frame.end());
    return;
  }
  const std::size_t base = out.size() - crossfade;
  for (std::size_t j = 0; j < crossfade; ++j) {
    const float t = static_cast<float>(j + 1) / static_cast<float>(crossfade + 1);
    out[base + j] = out[base + j] * (1.0f - t) + frame[j] * t;
  }
  out.insert(out.end(), frame.begin() + static_cast<std::ptrdiff_t>(crossfade),
             frame.end());
}

}  // namespace

void BlendedPath::append(const BlendedPath& other) {
  means.insert(means.end(), other.means.begin(), other.means.end());
  stds.insert(stds.end(), other.stds.begin(), other.stds.end());
}

LatentPath encode_audio(const VaeModel& model, const AudioBuffer& buffer,
                        std::size_t hop) {
  const AudioBuffer audio = at_model_rate(model, buffer);
  const WindowSet frames = window(audio, model.window_size(), hop);

  LatentPath path;
  path.window_size = model.window_size();
  path.hop = hop;
  path.latent_dim = model.latent_dim();
  path.sample_rate = audio.sample_rate;
  path.stats.reserve(frames.count());

  const std::size_t m = model.latent_dim();
  const std::size_t w = model.window_size();
  const auto matrix = frames.matrix();
  Workspace<float> ws;
  for (std::size_t start = 0; start < frames.count(); start += kChunkWindows) {
    const std::size_t n = std::min(kChunkWindows, frames.count() - start);
    encode_batch(model, matrix.subspan(start * w, n * w), n, ws);
    for (std::size_t i = 0; i < n; ++i) {
      LatentStats s;
      s.mu.assign(ws.mu.begin() + i * m, ws.mu.begin() + (i + 1) * m);
      s.logvar.assign(ws.logvar.begin() + i * m, ws.logvar.begin() + (i + 1) * m);
      path.stats.push_back(std::move(s));
    }
  }
  return path;
}

BlendedPath blend_paths(const LatentPath& a, const LatentPath& b,
                        std::span<const double> weights) {
  if (a.size() != b.size() || a.size() != weights.size()) {
    throw Error(ErrorCode::kCurveLengthMismatch,
                "blend of " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()) + " windows with " +
                    std::to_string(weights.size()) + " weights");
  }
  BlendedPath out;
  out.means.resize(a.size());
  out.stds.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& sa = a.stats[i];
    const auto& sb = b.stats[i];
    if (sa.dim() != sb.dim()) {
      throw Error(ErrorCode::kShapeMismatch, "latent dimensions differ");
    }
    const double c = weights[i];
    auto& mu = out.means[i];
    auto& sd = out.stds[i];
    mu.resize(sa.dim());
    sd.resize(sa.dim());
    for (std::size_t j = 0; j < sa.dim(); ++j) {
      mu[j] = static_cast<float>(c * sa.mu[j] + (1.0 - c) * sb.mu[j]);
      const double sigma_a = std::exp(0.5 * static_cast<double>(sa.logvar[j]));
      const double sigma_b = std::exp(0.5 * static_cast<double>(sb.logvar[j]));
      sd[j] = std::max(static_cast<float>(c * sigma_a + (1.0 - c) * sigma_b),
                       kMinBlendedStd);
    }
  }
  return out;
}

BlendedPath as_blended(const LatentPath& path) {
  BlendedPath out;
  for (const auto& s : path.stats) {
    out.means.push_back(s.mu);
    std::vector<float> sd(s.dim());
    for (std::size_t j = 0; j < s.dim(); ++j) {
      sd[j] = static_cast<float>(std::exp(0.5 * static_cast<double>(s.logvar[j])));
    }
    out.stds.push_back(std::move(sd));
  }
  return out;
}

AudioBuffer decode_path(const VaeModel& model,
                        std::span<const std::vector<float>> means,
                        std::span<const std::vector<float>> stds,
                        const SynthesisMode& mode, std::size_t crossfade) {
  const std::size_t m = model.latent_dim();
  const std::size_t w = model.window_size();
  if (means.size() != stds.size()) {
    throw Error(ErrorCode::kShapeMismatch, "mean and deviation sequences differ in length");
  }
  if (crossfade >= w) {
    throw Error(ErrorCode::kInvalidArgument, "crossfade must be shorter than a window");
  }
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (means[i].size() != m || stds[i].size() != m) {
      throw Error(ErrorCode::kShapeMismatch,
                  "window " + std::to_string(i) + " latent size differs from model");
    }
  }

  AudioBuffer out;
  out.sample_rate = model.hyper().sample_rate;
  out.samples.reserve(means.size() * w);

  std::mt19937_64 rng(mode.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool sampled = mode.kind == SynthesisMode::Kind::kSampled;

  std::vector<float> z;
  Workspace<float> ws;
  for (std::size_t start = 0; start < means.size(); start += kChunkWindows) {
    const std::size_t n = std::min(kChunkWindows, means.size() - start);
    z.resize(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& mu = means[start + i];
      const auto& sd = stds[start + i];
      for (std::size_t j = 0; j < m; ++j) {
        if (sampled) {
          if (!(sd[j] >= 0.0f)) {
            throw Error(ErrorCode::kInvalidArgument, "negative standard deviation");
          }
          z[i * m + j] = mu[j] + sd[j] * static_cast<float>(normal(rng));
        } else {
          z[i * m + j] = mu[j];
        }
      }
    }
    decode_batch(model, std::span<const float>(z), n, ws);
    const auto& frames = ws.dec_act.back();
    for (std::size_t i = 0; i < n; ++i) {
      append_frame(out.samples,
                   std::span<const float>(frames.data() + i * w, w), crossfade,
                   start + i == 0);
    }
  }
  return out;
}

std::size_t stepwise_segment_count(double range, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::kBadStep, "step must be a positive number");
  }
  if (!(range >= 0.0) || !std::isfinite(range)) {
    throw Error(ErrorCode::kBadStep, "range must be a non-negative number");
  }
  // 1e-9 absorbs round-off such as 0.3 / 0.1 = 2.9999999999999996.
  return static_cast<std::size_t>(std::floor(range / step + 1e-9)) + 1;
}

AudioBuffer stepwise_interpolate(const VaeModel& model, const AudioBuffer& a,
                                 const AudioBuffer& b, double range, double step,
                                 const SynthesisMode& mode, std::size_t crossfade) {
  const std::size_t segments = stepwise_segment_count(range, step);
  const auto [in1, in2] = prepared_pair(model, a, b);
  const std::size_t w = model.window_size();
  const LatentPath p1 = encode_audio(model, in1, w);
  const LatentPath p2 = encode_audio(model, in2, w);

  BlendedPath all;
  std::vector<double> weights(p1.size());
  for (std::size_t i = 0; i < segments; ++i) {
    std::fill(weights.begin(), weights.end(), static_cast<double>(i) * step);
    all.append(blend_paths(p1, p2, weights));
  }
  return decode_path(model, all.means, all.stds, mode, crossfade);
}

std::size_t meso_window_count(const VaeModel& model, const AudioBuffer& a,
                              const AudioBuffer& b) {
  return extended_window_count(model, a, b, model.window_size());
}

std::size_t extended_window_count(const VaeModel& model, const AudioBuffer& a,
                                  const AudioBuffer& b, std::size_t hop) {
  const auto [in1, in2] = prepared_pair(model, a, b);
  (void)in2;
  return window_count(in1.size(), model.window_size(), hop);
}

AudioBuffer meso_interpolate(const VaeModel& model, const AudioBuffer& a,
                             const AudioBuffer& b, const InterpolationCurve& curve,
                             const SynthesisMode& mode, std::size_t crossfade) {
  return extended_interpolate(model, a, b, curve, model.window_size(), mode, crossfade);
}

AudioBuffer extended_interpolate(const VaeModel& model, const AudioBuffer& a,
                                 const AudioBuffer& b,
                                 const InterpolationCurve& curve, std::size_t hop,
                                 const SynthesisMode& mode, std::size_t crossfade) {
  if (hop == 0) throw Error(ErrorCode::kInvalidArgument, "hop must be >= 1");
  const auto [in1, in2] = prepared_pair(model, a, b);
  if (in1.size() < model.window_size()) {
    throw Error(ErrorCode::kTooShort, "inputs are shorter than one window");
  }
  check_curve(curve, window_count(in1.size(), model.window_size(), hop));
  const LatentPath p1 = encode_audio(model, in1, hop);
  const LatentPath p2 = encode_audio(model, in2, hop);
  const BlendedPath blended = blend_paths(p1, p2, curve.values());
  return decode_path(model, blended.means, blended.stds, mode, crossfade);
}

void write_latents(const LatentPath& path, std::ostream& out) {
  const std::size_t m = path.latent_dim;
  out << "idx";
  for (std::size_t j = 0; j < m; ++j) out << ",mu_" << j;
  for (std::size_t j = 0; j < m; ++j) out << ",lv_" << j;
  out << '\n';
  char buf[32];
  auto put = [&](float v) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out << ',';
    out.write(buf, res.ptr - buf);
  };
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto& s = path.stats[i];
    if (s.dim() != m) throw Error(ErrorCode::kShapeMismatch, "ragged latent path");
    out << i;
    for (float v : s.mu) put(v);
    for (float v : s.logvar) put(v);
    out << '\n';
  }
}

void export_latents(const LatentPath& path, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + file.string());
  write_latents(path, out);
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + file.string());
}

}  // namespace rawvae
