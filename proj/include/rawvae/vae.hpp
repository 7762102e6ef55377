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

// Dense variational autoencoder over raw-audio windows.
//
// Encoder: window -> hidden layers (leaky rectifier, slope 0.01) -> two affine
// heads producing the posterior mean and log-variance. Decoder mirrors the
// hidden stack and ends in tanh so every output sample lies in (-1, 1).
//
// The math is templated on the scalar type. float is the production path and
// runs on the dispatched SIMD kernels; double runs on the scalar kernels and
// backs the finite-difference gradient checker.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace rawvae {

struct VaeHyperParams {
  std::size_t window_size = 1024;
  std::size_t latent_dim = 256;
  std::vector<std::size_t> hidden_sizes{512};
  double alpha = 1e-4;
  double learning_rate = 1e-4;
  int epochs = 500;
  std::size_t batch_size = 128;
  int sample_rate = 44100;
  std::uint64_t seed = 0;
  // Stride used when slicing training audio; inference uses window_size.
  std::size_t train_hop = 256;

  // Throws Error(kInvalidArgument) on a violated invariant.
  void validate() const;

  bool operator==(const VaeHyperParams&) const = default;
};

inline constexpr double kLeakySlope = 0.01;

template <typename T>
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<T> weight;  // out x in, row-major
  std::vector<T> bias;    // out

  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), weight(in_dim * out_dim), bias(out_dim) {}

  bool operator==(const DenseLayer&) const = default;
};

// Layers are kept in one canonical order: encoder hidden layers, mean head,
// log-variance head, decoder hidden layers, decoder output layer. Checkpoints
// and optimizer state follow the same order.
template <typename T>
class BasicVaeModel {
 public:
  BasicVaeModel() = default;
  // All-zero weights with the shapes implied by `hyper`.
  explicit BasicVaeModel(const VaeHyperParams& hyper);

  // Fan-in scaled uniform weights, zero biases.
  static BasicVaeModel initialized(const VaeHyperParams& hyper,
                                   std::mt19937_64& rng);

  const VaeHyperParams& hyper() const { return hyper_; }
  std::size_t window_size() const { return hyper_.window_size; }
  std::size_t latent_dim() const { return hyper_.latent_dim; }

  std::size_t encoder_hidden_count() const { return hyper_.hidden_sizes.size(); }
  const DenseLayer<T>& encoder_hidden(std::size_t i) const { return layers_[i]; }
  const DenseLayer<T>& mean_head() const { return layers_[encoder_hidden_count()]; }
  const DenseLayer<T>& logvar_head() const {
    return layers_[encoder_hidden_count() + 1];
  }
  // Decoder hidden layers followed by the output layer.
  std::size_t decoder_count() const { return encoder_hidden_count() + 1; }
  const DenseLayer<T>& decoder(std::size_t i) const {
    return layers_[encoder_hidden_count() + 2 + i];
  }

  std::vector<DenseLayer<T>>& layers() { return layers_; }
  const std::vector<DenseLayer<T>>& layers() const { return layers_; }

  // Weight then bias of every layer, in canonical order.
  std::vector<std::span<T>> parameters();
  std::vector<std::span<const T>> parameters() const;
  std::size_t parameter_count() const;

  void set_zero();
  bool all_finite() const;

  template <typename U>
  BasicVaeModel<U> cast() const {
    BasicVaeModel<U> out(hyper_);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      auto& dst = out.layers()[l];
      dst.weight.assign(layers_[l].weight.begin(), layers_[l].weight.end());
      dst.bias.assign(layers_[l].bias.begin(), layers_[l].bias.end());
    }
    return out;
  }

  bool operator==(const BasicVaeModel&) const = default;

 private:
  VaeHyperParams hyper_;
  std::vector<DenseLayer<T>> layers_;
};

using VaeModel = BasicVaeModel<float>;

struct LatentStats {
  std::vector<float> mu;
  std::vector<float> logvar;

  std::size_t dim() const { return mu.size(); }
  bool operator==(const LatentStats&) const = default;
};

struct LossTerms {
  double total = 0.0;
  double recon = 0.0;
  double kl = 0.0;
};

// Activations for one batch. Reused across calls to avoid reallocation.
template <typename T>
struct Workspace {
  std::size_t batch = 0;
  std::vector<std::vector<T>> enc_pre, enc_act;
  std::vector<T> mu, logvar, sigma, z;
  std::vector<std::vector<T>> dec_pre, dec_act;  // last entry is the output
  // Gradient scratch.
  std::vector<T> grad_a, grad_b, grad_mu, grad_logvar;
};

// Batched passes over `n` row-major windows / latents.
template <typename T>
void encode_batch(const BasicVaeModel<T>& model, std::span<const T> x,
                  std::size_t n, Workspace<T>& ws);
template <typename T>
void decode_batch(const BasicVaeModel<T>& model, std::span<const T> z,
                  std::size_t n, Workspace<T>& ws);

// Full stochastic forward pass with fixed noise `eps` (n x latent_dim).
// Returns batch-mean loss terms.
template <typename T>
LossTerms forward_loss(const BasicVaeModel<T>& model, std::span<const T> x,
                       std::span<const T> eps, std::size_t n, double alpha,
                       Workspace<T>& ws);

// Forward + exact backward pass. `grads` must have the model's shapes; it is
// overwritten with d(total)/d(parameter).
template <typename T>
LossTerms backward(const BasicVaeModel<T>& model, std::span<const T> x,
                   std::span<const T> eps, std::size_t n, double alpha,
                   Workspace<T>& ws, BasicVaeModel<T>& grads);

// Single-window API.
LatentStats encoder_forward(const VaeModel& model, std::span<const float> x);
std::vector<float> reparameterize(const LatentStats& stats,
                                  std::span<const float> eps);
std::vector<float> decoder_forward(const VaeModel& model,
                                   std::span<const float> z);

// 0.5 * sum(mu^2 + exp(logvar) - logvar - 1): KL(N(mu, sigma^2 I) || N(0, I)).
double kl_divergence(const LatentStats& stats);

// recon = mean squared error over the window, kl = kl_divergence(stats),
// total = recon + alpha * kl. Training minimizes total.
LossTerms elbo_loss(std::span<const float> x, std::span<const float> x_hat,
                    const LatentStats& stats, double alpha);

extern template class BasicVaeModel<float>;
extern template class BasicVaeModel<double>;

}  // namespace rawvae
