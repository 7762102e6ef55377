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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rawvae/audio.hpp"
#include "rawvae/vae.hpp"

namespace rawvae::testing {

inline AudioBuffer sine(double freq, std::size_t n, int rate = 44100, double amp = 0.5,
                        double phase = 0.0) {
  AudioBuffer out;
  out.sample_rate = rate;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i] = static_cast<float>(
        amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate + phase));
  }
  return out;
}

inline AudioBuffer noise(std::size_t n, std::uint64_t seed, int rate = 44100, double amp = 0.3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  AudioBuffer out;
  out.sample_rate = rate;
  out.samples.resize(n);
  for (auto& s : out.samples) s = static_cast<float>(u(rng));
  return out;
}

// Small architecture that keeps unit tests fast.
inline VaeHyperParams small_hyper(std::size_t window = 64, std::size_t latent = 4,
                                  std::size_t hidden = 16) {
  VaeHyperParams h;
  h.window_size = window;
  h.latent_dim = latent;
  h.hidden_sizes = {hidden};
  h.batch_size = 8;
  h.epochs = 3;
  h.learning_rate = 1e-3;
  h.train_hop = window / 2;
  return h;
}

inline VaeModel random_model(const VaeHyperParams& h, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  return VaeModel::initialized(h, rng);
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("rawvae_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace rawvae::testing
