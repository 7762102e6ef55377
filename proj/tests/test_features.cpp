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

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "rawvae/error.hpp"
#include "rawvae/features.hpp"
#include "support.hpp"

namespace rawvae {
namespace {

TEST(ThumbnailConfig, DefaultsAndTextForm) {
  const ThumbnailConfig c;
  EXPECT_EQ(c.features_per_frame(), 15u);
  EXPECT_EQ(c.dimension(), 30u);
  EXPECT_EQ(c.to_string(), "frame=2048,hop=1024,mels=40,mfcc=13,centroid=1,rms=1");
  EXPECT_EQ(ThumbnailConfig::parse(c.to_string()), c);

  ThumbnailConfig d;
  d.frame_size = 512;
  d.centroid = false;
  EXPECT_EQ(ThumbnailConfig::parse(d.to_string()), d);
  EXPECT_EQ(d.dimension(), 28u);

  EXPECT_THROW(ThumbnailConfig::parse("frame=2048,bogus=1"), Error);
  EXPECT_THROW(ThumbnailConfig::parse("mels=10,mfcc=13"), Error);
}

TEST(Features, FrameCountAndTooShort) {
  const ThumbnailConfig c;
  EXPECT_EQ(frame_features(testing::noise(2048, 1), c).size(), 1u);
  EXPECT_EQ(frame_features(testing::noise(5000, 1), c).size(), 3u);
  try {
    frame_features(testing::noise(2047, 1), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooShort);
  }
}

TEST(Features, SilenceGivesFloorCepstrum) {
  AudioBuffer silent;
  silent.samples.assign(4096, 0.0f);
  const auto rows = frame_features(silent, ThumbnailConfig{});
  // Orthonormal DCT of a constant vector: all energy in c0 = sqrt(N) * value.
  EXPECT_NEAR(rows[0][0], std::sqrt(40.0) * std::log(1e-10), 1e-9);
  for (std::size_t k = 1; k < 13; ++k) EXPECT_NEAR(rows[0][k], 0.0, 1e-9);
  EXPECT_EQ(rows[0][13], 0.0);  // centroid of an empty spectrum
  EXPECT_EQ(rows[0][14], 0.0);  // rms
}

TEST(Features, GainOnlyShiftsTheZerothCoefficient) {
  const AudioBuffer x = testing::noise(4096, 7, 44100, 0.5);
  AudioBuffer y = x;
  for (float& s : y.samples) s *= 0.25f;
  const auto fx = frame_features(x, ThumbnailConfig{});
  const auto fy = frame_features(y, ThumbnailConfig{});
  for (std::size_t f = 0; f < fx.size(); ++f) {
    EXPECT_NEAR(fx[f][0] - fy[f][0], -std::sqrt(40.0) * std::log(0.0625), 1e-6);
    for (std::size_t k = 1; k < 13; ++k) EXPECT_NEAR(fx[f][k], fy[f][k], 1e-6);
    EXPECT_NEAR(fx[f][13], fy[f][13], 1e-6);  // centroid is scale free
    EXPECT_NEAR(fy[f][14], 0.25 * fx[f][14], 1e-9);
  }
}

TEST(Features, CentroidMatchesNaiveDft) {
  ThumbnailConfig c;
  c.frame_size = 256;
  c.hop = 256;
  c.n_mels = 20;
  c.n_mfcc = 5;
  const AudioBuffer x = testing::noise(256, 11);
  const auto rows = frame_features(x, c);
  ASSERT_EQ(rows.size(), 1u);

  const std::size_t n = 256;
  double weighted = 0.0, total = 0.0, energy = 0.0;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * double(i) / double(n));
      acc += double(x.samples[i]) * w *
             std::polar(1.0, -2 * std::numbers::pi * double(k * i) / double(n));
    }
    weighted += std::abs(acc) * double(k) * 44100.0 / double(n);
    total += std::abs(acc);
  }
  for (float s : x.samples) energy += double(s) * s;
  EXPECT_NEAR(rows[0][5], weighted / total, 1e-6 * weighted / total);
  EXPECT_NEAR(rows[0][6], std::sqrt(energy / n), 1e-12);
}

TEST(Features, CentroidOfASineSitsAtItsFrequency) {
  // 1033.59375 Hz is bin 48 of a 2048-point frame at 44.1 kHz.
  const double f = 48 * 44100.0 / 2048.0;
  const auto rows = frame_features(testing::sine(f, 2048, 44100, 0.5), ThumbnailConfig{});
  EXPECT_NEAR(rows[0][13], f, 1e-6 * f);
  EXPECT_NEAR(rows[0][14], 0.5 / std::sqrt(2.0), 1e-4);
}

TEST(Thumbnail, MeansThenPopulationDeviations) {
  const AudioBuffer x = testing::noise(9000, 3);
  const ThumbnailConfig c;
  const auto rows = frame_features(x, c);
  const Thumbnail t = extract_thumbnail(x, c, "clip.wav");
  EXPECT_EQ(t.file_ref, "clip.wav");
  EXPECT_EQ(t.config, c);
  ASSERT_EQ(t.features.size(), 30u);
  for (std::size_t j = 0; j < 15; ++j) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r[j];
    mean /= double(rows.size());
    double var = 0.0;
    for (const auto& r : rows) var += (r[j] - mean) * (r[j] - mean);
    var /= double(rows.size());
    EXPECT_NEAR(t.features[j], mean, 1e-9 * (1 + std::abs(mean)));
    EXPECT_NEAR(t.features[15 + j], std::sqrt(var), 1e-9 * (1 + std::abs(mean)));
  }
}

TEST(Thumbnail, PeriodicSignalHasZeroSpread) {
  // A period that divides the hop makes every frame identical.
  const AudioBuffer x = testing::sine(44100.0 / 64.0, 2048 + 1024 * 5);
  const Thumbnail t = extract_thumbnail(x);
  for (std::size_t j = 15; j < 30; ++j) EXPECT_NEAR(t.features[j], 0.0, 1e-9);

  AudioBuffer dc;
  dc.samples.assign(6000, 0.25f);
  const Thumbnail d = extract_thumbnail(dc);
  for (std::size_t j = 15; j < 30; ++j) EXPECT_EQ(d.features[j], 0.0);
  EXPECT_EQ(d.features[14], 0.25);
}

TEST(Thumbnail, OptionalFeaturesChangeDimension) {
  ThumbnailConfig c;
  c.centroid = false;
  c.rms = false;
  EXPECT_EQ(extract_thumbnail(testing::noise(4096, 2), c).features.size(), 26u);
}

}  // namespace
}  // namespace rawvae
