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

#include "rawvae/vae.hpp"

#include <algorithm>
#include <cmath>

#include "rawvae/error.hpp"
#include "rawvae/simd/kernels.hpp"

namespace rawvae {

void VaeHyperParams::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, what);
  };
  if (window_size < 1) fail("window_size must be >= 1");
  if (latent_dim < 1) fail("latent_dim must be >= 1");
  for (std::size_t h : hidden_sizes) {
    if (h < 1) fail("hidden layer sizes must be >= 1");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha must be finite and >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    fail("learning_rate must be finite and > 0");
  }
  if (epochs < 0) fail("epochs must be >= 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (sample_rate <= 0) fail("sample_rate must be > 0");
  if (train_hop < 1) fail("train_hop must be >= 1");
}

template <typename T>
BasicVaeModel<T>::BasicVaeModel(const VaeHyperParams& hyper) : hyper_(hyper) {
  hyper_.validate();
  std::size_t prev = hyper_.window_size;
  for (std::size_t h : hyper_.hidden_sizes) {
    layers_.emplace_back(prev, h);
    prev = h;
  }
  layers_.emplace_back(prev, hyper_.latent_dim);
  layers_.emplace_back(prev, hyper_.latent_dim);
  prev = hyper_.latent_dim;
  for (auto it = hyper_.hidden_sizes.rbegin(); it != hyper_.hidden_sizes.rend(); ++it) {
    layers_.emplace_back(prev, *it);
    prev = *it;
  }
  layers_.emplace_back(prev, hyper_.window_size);
}

template <typename T>
BasicVaeModel<T> BasicVaeModel<T>::initialized(const VaeHyperParams& hyper,
                                               std::mt19937_64& rng) {
  BasicVaeModel model(hyper);
  for (auto& layer : model.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (T& w : layer.weight) w = static_cast<T>(dist(rng));
  }
  return model;
}

template <typename T>
std::vector<std::span<T>> BasicVaeModel<T>::parameters() {
  std::vector<std::span<T>> out;
  out.reserve(layers_.size() * 2);
  for (auto& layer : layers_) {
    out.emplace_back(layer.weight);
    out.emplace_back(layer.bias);
  }
  return out;
}

template <typename T>
std::vector<std::span<const T>> BasicVaeModel<T>::parameters() const {
  std::vector<std::span<const T>> out;
  out.reserve(layers_.size() * 2);
  for (const auto& layer : layers_) {
    out.emplace_back(layer.weight);
    out.emplace_back(layer.bias);
  }
  return out;
}

template <typename T>
std::size_t BasicVaeModel<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

template <typename T>
void BasicVaeModel<T>::set_zero() {
  for (auto& layer : layers_) {
    std::fill(layer.weight.begin(), layer.weight.end(), T(0));
    std::fill(layer.bias.begin(), layer.bias.end(), T(0));
  }
}

template <typename T>
bool BasicVaeModel<T>::all_finite() const {
  for (const auto& p : parameters()) {
    for (T v : p) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

template class BasicVaeModel<float>;
template class BasicVaeModel<double>;

namespace {

template <typename T>
void apply_affine(const DenseLayer<T>& layer, const T* x, std::size_t n,
                  std::vector<T>& y) {
  y.resize(n * layer.out);
  simd::kernels<T>().affine_forward(x, n, layer.in, layer.weight.data(),
                                    layer.bias.data(), layer.out, y.data());
}

template <typename T>
void apply_leaky(const std::vector<T>& pre, std::vector<T>& act) {
  act.resize(pre.size());
  simd::kernels<T>().leaky_relu(pre.data(), act.data(), pre.size(),
                                static_cast<T>(kLeakySlope));
}

template <typename T>
void check_batch(std::span<const T> data, std::size_t n, std::size_t width,
                 const char* what) {
  if (data.size() != n * width) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(what) + ": expected " + std::to_string(n * width) +
                    " values, got " + std::to_string(data.size()));
  }
}

template <typename T>
void backprop_layer(const DenseLayer<T>& layer, const T* input,
                    const std::vector<T>& grad_out, std::size_t n,
                    DenseLayer<T>& grad_layer) {
  simd::kernels<T>().accumulate_weight_grad(grad_out.data(), n, layer.out, input,
                                            layer.in, grad_layer.weight.data(),
                                            grad_layer.bias.data());
}

template <typename T>
void backprop_to_input(const DenseLayer<T>& layer, const std::vector<T>& grad_out,
                       std::size_t n, std::vector<T>& grad_in) {
  grad_in.resize(n * layer.in);
  simd::kernels<T>().backprop_input(grad_out.data(), n, layer.out,
                                    layer.weight.data(), layer.in, grad_in.data());
}

}  // namespace

template <typename T>
void encode_batch(const BasicVaeModel<T>& model, std::span<const T> x,
                  std::size_t n, Workspace<T>& ws) {
  check_batch(x, n, model.window_size(), "encoder input");
  const std::size_t hidden = model.encoder_hidden_count();
  ws.batch = n;
  ws.enc_pre.resize(hidden);
  ws.enc_act.resize(hidden);
  const T* h = x.data();
  for (std::size_t i = 0; i < hidden; ++i) {
    apply_affine(model.encoder_hidden(i), h, n, ws.enc_pre[i]);
    apply_leaky(ws.enc_pre[i], ws.enc_act[i]);
    h = ws.enc_act[i].data();
  }
  apply_affine(model.mean_head(), h, n, ws.mu);
  apply_affine(model.logvar_head(), h, n, ws.logvar);
}

template <typename T>
void decode_batch(const BasicVaeModel<T>& model, std::span<const T> z,
                  std::size_t n, Workspace<T>& ws) {
  check_batch(z, n, model.latent_dim(), "decoder input");
  const std::size_t layers = model.decoder_count();
  ws.batch = n;
  ws.dec_pre.resize(layers);
  ws.dec_act.resize(layers);
  const T* g = z.data();
  for (std::size_t i = 0; i < layers; ++i) {
    apply_affine(model.decoder(i), g, n, ws.dec_pre[i]);
    if (i + 1 < layers) {
      apply_leaky(ws.dec_pre[i], ws.dec_act[i]);
    } else {
      auto& out = ws.dec_act[i];
      out.resize(ws.dec_pre[i].size());
      std::transform(ws.dec_pre[i].begin(), ws.dec_pre[i].end(), out.begin(),
                     [](T v) { return std::tanh(v); });
    }
    g = ws.dec_act[i].data();
  }
}

template <typename T>
LossTerms forward_loss(const BasicVaeModel<T>& model, std::span<const T> x,
                       std::span<const T> eps, std::size_t n, double alpha,
                       Workspace<T>& ws) {
  const std::size_t latent = model.latent_dim();
  const std::size_t width = model.window_size();
  check_batch(eps, n, latent, "noise");
  encode_batch(model, x, n, ws);

  ws.sigma.resize(n * latent);
  ws.z.resize(n * latent);
  for (std::size_t i = 0; i < n * latent; ++i) {
    ws.sigma[i] = std::exp(ws.logvar[i] / T(2));
    ws.z[i] = ws.mu[i] + ws.sigma[i] * eps[i];
  }
  decode_batch(model, std::span<const T>(ws.z), n, ws);

  const auto& out = ws.dec_act.back();
  double recon = 0.0;
  double kl = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    double sq = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      const double d = static_cast<double>(out[s * width + k]) - x[s * width + k];
      sq += d * d;
    }
    recon += sq / static_cast<double>(width);
    double kl_s = 0.0;
    for (std::size_t j = 0; j < latent; ++j) {
      const double mu = ws.mu[s * latent + j];
      const double lv = ws.logvar[s * latent + j];
      kl_s += mu * mu + std::exp(lv) - lv - 1.0;
    }
    kl += 0.5 * kl_s;
  }
  LossTerms terms;
  terms.recon = recon / static_cast<double>(n);
  terms.kl = kl / static_cast<double>(n);
  terms.total = terms.recon + alpha * terms.kl;
  return terms;
}

template <typename T>
LossTerms backward(const BasicVaeModel<T>& model, std::span<const T> x,
                   std::span<const T> eps, std::size_t n, double alpha,
                   Workspace<T>& ws, BasicVaeModel<T>& grads) {
  const LossTerms terms = forward_loss(model, x, eps, n, alpha, ws);
  grads.set_zero();

  const std::size_t latent = model.latent_dim();
  const std::size_t width = model.window_size();
  const std::size_t hidden = model.encoder_hidden_count();
  const std::size_t dec_layers = model.decoder_count();
  const std::size_t dec_base = hidden + 2;

  // d(total)/d(pre-tanh output)
  const auto& out = ws.dec_act.back();
  const T recon_scale = T(2) / static_cast<T>(width * n);
  ws.grad_a.resize(n * width);
  for (std::size_t i = 0; i < n * width; ++i) {
    const T y = out[i];
    ws.grad_a[i] = recon_scale * (y - x[i]) * (T(1) - y * y);
  }

  for (std::size_t d = dec_layers; d-- > 0;) {
    const auto& layer = model.decoder(d);
    const T* input = d == 0 ? ws.z.data() : ws.dec_act[d - 1].data();
    backprop_layer(layer, input, ws.grad_a, n, grads.layers()[dec_base + d]);
    backprop_to_input(layer, ws.grad_a, n, ws.grad_b);
    if (d > 0) {
      simd::kernels<T>().leaky_relu_backward(ws.dec_pre[d - 1].data(),
                                             ws.grad_b.data(), ws.grad_b.size(),
                                             static_cast<T>(kLeakySlope));
    }
    std::swap(ws.grad_a, ws.grad_b);
  }
  // ws.grad_a now holds d(total)/dz.

  const T kl_scale = static_cast<T>(alpha) / static_cast<T>(n);
  ws.grad_mu.resize(n * latent);
  ws.grad_logvar.resize(n * latent);
  for (std::size_t i = 0; i < n * latent; ++i) {
    const T dz = ws.grad_a[i];
    ws.grad_mu[i] = dz + kl_scale * ws.mu[i];
    ws.grad_logvar[i] = dz * eps[i] * ws.sigma[i] / T(2) +
                        kl_scale * (std::exp(ws.logvar[i]) - T(1)) / T(2);
  }

  const T* h_last = hidden == 0 ? x.data() : ws.enc_act[hidden - 1].data();
  backprop_layer(model.mean_head(), h_last, ws.grad_mu, n, grads.layers()[hidden]);
  backprop_layer(model.logvar_head(), h_last, ws.grad_logvar, n,
                 grads.layers()[hidden + 1]);
  if (hidden == 0) return terms;

  backprop_to_input(model.mean_head(), ws.grad_mu, n, ws.grad_a);
  backprop_to_input(model.logvar_head(), ws.grad_logvar, n, ws.grad_b);
  for (std::size_t i = 0; i < ws.grad_a.size(); ++i) ws.grad_a[i] += ws.grad_b[i];

  for (std::size_t l = hidden; l-- > 0;) {
    simd::kernels<T>().leaky_relu_backward(ws.enc_pre[l].data(), ws.grad_a.data(),
                                           ws.grad_a.size(),
                                           static_cast<T>(kLeakySlope));
    const T* input = l == 0 ? x.data() : ws.enc_act[l - 1].data();
    backprop_layer(model.encoder_hidden(l), input, ws.grad_a, n, grads.layers()[l]);
    if (l > 0) {
      backprop_to_input(model.encoder_hidden(l), ws.grad_a, n, ws.grad_b);
      std::swap(ws.grad_a, ws.grad_b);
    }
  }
  return terms;
}

#define RAWVAE_INSTANTIATE(T)                                                    \
  template void encode_batch<T>(const BasicVaeModel<T>&, std::span<const T>,     \
                                std::size_t, Workspace<T>&);                     \
  template void decode_batch<T>(const BasicVaeModel<T>&, std::span<const T>,     \
                                std::size_t, Workspace<T>&);                     \
  template LossTerms forward_loss<T>(const BasicVaeModel<T>&, std::span<const T>, \
                                     std::span<const T>, std::size_t, double,    \
                                     Workspace<T>&);                             \
  template LossTerms backward<T>(const BasicVaeModel<T>&, std::span<const T>,    \
                                 std::span<const T>, std::size_t, double,        \
                                 Workspace<T>&, BasicVaeModel<T>&);

RAWVAE_INSTANTIATE(float)
RAWVAE_INSTANTIATE(double)
#undef RAWVAE_INSTANTIATE

LatentStats encoder_forward(const VaeModel& model, std::span<const float> x) {
  if (x.size() != model.window_size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "frame has " + std::to_string(x.size()) + " samples, model expects " +
                    std::to_string(model.window_size()));
  }
  Workspace<float> ws;
  encode_batch(model, x, 1, ws);
  return LatentStats{std::move(ws.mu), std::move(ws.logvar)};
}

std::vector<float> reparameterize(const LatentStats& stats,
                                  std::span<const float> eps) {
  if (eps.size() != stats.dim() || stats.logvar.size() != stats.dim()) {
    throw Error(ErrorCode::kShapeMismatch, "noise length differs from latent size");
  }
  std::vector<float> z(stats.dim());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = stats.mu[i] + std::exp(stats.logvar[i] / 2.0f) * eps[i];
  }
  return z;
}

std::vector<float> decoder_forward(const VaeModel& model, std::span<const float> z) {
  if (z.size() != model.latent_dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "latent has " + std::to_string(z.size()) + " entries, model expects " +
                    std::to_string(model.latent_dim()));
  }
  Workspace<float> ws;
  decode_batch(model, z, 1, ws);
  return std::move(ws.dec_act.back());
}

double kl_divergence(const LatentStats& stats) {
  double sum = 0.0;
  for (std::size_t i = 0; i < stats.dim(); ++i) {
    const double mu = stats.mu[i];
    const double lv = stats.logvar[i];
    sum += mu * mu + std::exp(lv) - lv - 1.0;
  }
  return 0.5 * sum;
}

LossTerms elbo_loss(std::span<const float> x, std::span<const float> x_hat,
                    const LatentStats& stats, double alpha) {
  if (x.size() != x_hat.size() || x.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "reconstruction length differs from input");
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = static_cast<double>(x[i]) - x_hat[i];
    sq += d * d;
  }
  LossTerms terms;
  terms.recon = sq / static_cast<double>(x.size());
  terms.kl = kl_divergence(stats);
  terms.total = terms.recon + alpha * terms.kl;
  return terms;
}

}  // namespace rawvae
