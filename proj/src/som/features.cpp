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

#include "rawvae/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rawvae/container.hpp"
#include "rawvae/error.hpp"

namespace rawvae {
namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(fftw_alloc_real(n)),
        out_(fftw_alloc_complex(n / 2 + 1)),
        plan_(fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE)) {}
  ~RealFft() {
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  // Magnitudes of bins 0..n/2.
  void magnitudes(std::vector<double>& mag) {
    fftw_execute(plan_);
    mag.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k < mag.size(); ++k) {
      mag[k] = std::hypot(out_[k][0], out_[k][1]);
    }
  }

 private:
  std::size_t n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

// Triangular filters evenly spaced on the mel scale from 0 Hz to Nyquist.
std::vector<std::vector<double>> mel_filterbank(std::size_t n_mels,
                                                std::size_t fft_size, int rate) {
  const std::size_t bins = fft_size / 2 + 1;
  const double max_mel = hz_to_mel(rate / 2.0);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(max_mel * static_cast<double>(i) / (n_mels + 1));
  }
  std::vector<std::vector<double>> bank(n_mels, std::vector<double>(bins, 0.0));
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * rate / static_cast<double>(fft_size);
      if (f > lo && f < mid) {
        bank[m][k] = (f - lo) / (mid - lo);
      } else if (f >= mid && f < hi) {
        bank[m][k] = (hi - f) / (hi - mid);
      }
    }
  }
  return bank;
}

}  // namespace

void ThumbnailConfig::validate() const {
  if (frame_size < 2 || hop < 1 || n_mels < 1 || n_mfcc < 1 || n_mfcc > n_mels) {
    throw Error(ErrorCode::kInvalidArgument, "invalid thumbnail config " + to_string());
  }
}

std::string ThumbnailConfig::to_string() const {
  std::ostringstream out;
  out << "frame=" << frame_size << ",hop=" << hop << ",mels=" << n_mels
      << ",mfcc=" << n_mfcc << ",centroid=" << (centroid ? 1 : 0)
      << ",rms=" << (rms ? 1 : 0);
  return out.str();
}

ThumbnailConfig ThumbnailConfig::parse(const std::string& text) {
  ThumbnailConfig c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "bad feature config item '" + item + "'");
    }
    const std::string key = item.substr(0, eq);
    const std::size_t value = parse_u64(item.substr(eq + 1));
    if (key == "frame") c.frame_size = value;
    else if (key == "hop") c.hop = value;
    else if (key == "mels") c.n_mels = value;
    else if (key == "mfcc") c.n_mfcc = value;
    else if (key == "centroid") c.centroid = value != 0;
    else if (key == "rms") c.rms = value != 0;
    else throw Error(ErrorCode::kInvalidArgument, "unknown feature config key '" + key + "'");
  }
  c.validate();
  return c;
}

std::vector<std::vector<double>> frame_features(const AudioBuffer& buffer,
                                                const ThumbnailConfig& config) {
  config.validate();
  const std::size_t n = config.frame_size;
  if (buffer.size() < n) {
    throw Error(ErrorCode::kTooShort,
                "thumbnail needs at least " + std::to_string(n) + " samples, got " +
                    std::to_string(buffer.size()));
  }
  const std::size_t frames = window_count(buffer.size(), n, config.hop);
  const auto bank = mel_filterbank(config.n_mels, n, buffer.sample_rate);

  std::vector<double> hann(n);
  for (std::size_t i = 0; i < n; ++i) {
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                   static_cast<double>(n));
  }

  RealFft fft(n);
  std::vector<double> mag;
  std::vector<double> log_mel(config.n_mels);
  std::vector<std::vector<double>> out;
  out.reserve(frames);
  const double mels = static_cast<double>(config.n_mels);
  for (std::size_t f = 0; f < frames; ++f) {
    const float* x = buffer.samples.data() + f * config.hop;
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      fft.input()[i] = x[i] * hann[i];
      energy += static_cast<double>(x[i]) * x[i];
    }
    fft.magnitudes(mag);

    for (std::size_t m = 0; m < config.n_mels; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < mag.size(); ++k) e += bank[m][k] * mag[k] * mag[k];
      log_mel[m] = std::log(e + 1e-10);
    }
    std::vector<double> row;
    row.reserve(config.features_per_frame());
    // Orthonormal DCT-II of the log mel energies.
    for (std::size_t c = 0; c < config.n_mfcc; ++c) {
      double acc = 0.0;
      for (std::size_t m = 0; m < config.n_mels; ++m) {
        acc += log_mel[m] * std::cos(std::numbers::pi * static_cast<double>(c) *
                                     (static_cast<double>(m) + 0.5) / mels);
      }
      row.push_back(acc * std::sqrt((c == 0 ? 1.0 : 2.0) / mels));
    }
    if (config.centroid) {
      double weighted = 0.0, total = 0.0;
      for (std::size_t k = 0; k < mag.size(); ++k) {
        weighted += mag[k] * static_cast<double>(k) * buffer.sample_rate / static_cast<double>(n);
        total += mag[k];
      }
      row.push_back(total > 0.0 ? weighted / total : 0.0);
    }
    if (config.rms) row.push_back(std::sqrt(energy / static_cast<double>(n)));
    out.push_back(std::move(row));
  }
  return out;
}

Thumbnail extract_thumbnail(const AudioBuffer& buffer, const ThumbnailConfig& config,
                            std::string file_ref) {
  const auto rows = frame_features(buffer, config);
  const std::size_t d = config.features_per_frame();
  Thumbnail t;
  t.file_ref = std::move(file_ref);
  t.config = config;
  t.features.assign(2 * d, 0.0);
  const double count = static_cast<double>(rows.size());
  for (std::size_t j = 0; j < d; ++j) {
    double lo = rows[0][j], hi = rows[0][j], sum = 0.0;
    for (const auto& r : rows) {
      lo = std::min(lo, r[j]);
      hi = std::max(hi, r[j]);
      sum += r[j];
    }
    if (lo == hi) {
      // Constant feature: report it exactly, with zero spread.
      t.features[j] = lo;
      t.features[d + j] = 0.0;
      continue;
    }
    const double mean = sum / count;
    double sq = 0.0;
    for (const auto& r : rows) sq += (r[j] - mean) * (r[j] - mean);
    t.features[j] = mean;
    t.features[d + j] = std::sqrt(sq / count);
  }
  return t;
}

}  // namespace rawvae
