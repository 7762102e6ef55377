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
#include <cstddef>

#include "rawvae/simd/kernels.hpp"

namespace rawvae::simd::scalar {

template <typename T>
void affine_forward(const T* x, std::size_t n, std::size_t in, const T* w,
                    const T* b, std::size_t out, T* y) {
  for (std::size_t s = 0; s < n; ++s) {
    const T* xs = x + s * in;
    for (std::size_t o = 0; o < out; ++o) {
      const T* wo = w + o * in;
      T acc = 0;
      for (std::size_t k = 0; k < in; ++k) acc += xs[k] * wo[k];
      y[s * out + o] = acc + b[o];
    }
  }
}

template <typename T>
void backprop_input(const T* dy, std::size_t n, std::size_t out, const T* w,
                    std::size_t in, T* dx) {
  for (std::size_t s = 0; s < n; ++s) {
    T* dxs = dx + s * in;
    for (std::size_t k = 0; k < in; ++k) dxs[k] = 0;
    for (std::size_t o = 0; o < out; ++o) {
      const T g = dy[s * out + o];
      const T* wo = w + o * in;
      for (std::size_t k = 0; k < in; ++k) dxs[k] += g * wo[k];
    }
  }
}

template <typename T>
void accumulate_weight_grad(const T* dy, std::size_t n, std::size_t out,
                            const T* x, std::size_t in, T* dw, T* db) {
  for (std::size_t o = 0; o < out; ++o) {
    T* dwo = dw + o * in;
    for (std::size_t s = 0; s < n; ++s) {
      const T g = dy[s * out + o];
      const T* xs = x + s * in;
      for (std::size_t k = 0; k < in; ++k) dwo[k] += g * xs[k];
      db[o] += g;
    }
  }
}

template <typename T>
void leaky_relu(const T* x, T* y, std::size_t n, T slope) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] < 0 ? x[i] * slope : x[i];
}

template <typename T>
void leaky_relu_backward(const T* pre, T* grad, std::size_t n, T slope) {
  for (std::size_t i = 0; i < n; ++i) {
    if (pre[i] < 0) grad[i] *= slope;
  }
}

template <typename T>
void adam_update(T* param, const T* grad, T* m, T* v, std::size_t n,
                 const AdamCoefficients<T>& c) {
  const T one_minus_b1 = T(1) - c.beta1;
  const T one_minus_b2 = T(1) - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const T g = grad[i];
    m[i] = c.beta1 * m[i] + one_minus_b1 * g;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g * g);
    const T m_hat = m[i] / c.bias_correction1;
    const T v_hat = v[i] / c.bias_correction2;
    param[i] = param[i] - c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

template <typename T>
T squared_distance(const T* a, const T* b, std::size_t n) {
  T acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const T d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

template <typename T>
KernelTable<T> make_table() {
  return KernelTable<T>{
      Backend::kScalar,       &affine_forward<T>,
      &backprop_input<T>,     &accumulate_weight_grad<T>,
      &leaky_relu<T>,         &leaky_relu_backward<T>,
      &adam_update<T>,        &squared_distance<T>,
  };
}

}  // namespace rawvae::simd::scalar
