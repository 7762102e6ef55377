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

// Dense-layer and elementwise kernels behind a runtime-selected table.
//
// Every kernel has a portable scalar reference. On x86-64 an AVX2+FMA variant
// is selected at startup when the CPU supports it; RAWVAE_KERNELS=scalar in
// the environment (or set_backend) forces the reference path. The double
// table is always scalar and exists for the gradient checker.
//
// All matrices are row-major. Within one backend, each output element is
// computed by the same instruction sequence no matter how many rows are in
// the batch, so a frame encodes to the same bits alone or inside a batch.

#include <cstddef>
#include <string_view>

namespace rawvae::simd {

enum class Backend { kScalar, kAvx2 };

template <typename T>
struct AdamCoefficients {
  T learning_rate;
  T beta1;
  T beta2;
  T epsilon;
  T bias_correction1;  // 1 - beta1^t
  T bias_correction2;  // 1 - beta2^t
};

template <typename T>
struct KernelTable {
  Backend backend;

  // y[n x out] = x[n x in] * w[out x in]^T + b[out]
  void (*affine_forward)(const T* x, std::size_t n, std::size_t in, const T* w,
                         const T* b, std::size_t out, T* y);
  // dx[n x in] = dy[n x out] * w[out x in]
  void (*backprop_input)(const T* dy, std::size_t n, std::size_t out,
                         const T* w, std::size_t in, T* dx);
  // dw[out x in] += dy^T * x, db[out] += column sums of dy
  void (*accumulate_weight_grad)(const T* dy, std::size_t n, std::size_t out,
                                 const T* x, std::size_t in, T* dw, T* db);
  // y = x < 0 ? slope * x : x
  void (*leaky_relu)(const T* x, T* y, std::size_t n, T slope);
  // grad *= (pre < 0 ? slope : 1)
  void (*leaky_relu_backward)(const T* pre, T* grad, std::size_t n, T slope);
  void (*adam_update)(T* param, const T* grad, T* m, T* v, std::size_t n,
                      const AdamCoefficients<T>& c);
  T (*squared_distance)(const T* a, const T* b, std::size_t n);
};

bool backend_available(Backend backend);
Backend active_backend();
// Throws Error(kInvalidArgument) when the backend is not available here.
void set_backend(Backend backend);
std::string_view backend_name(Backend backend);

const KernelTable<float>& table_for(Backend backend);

template <typename T>
const KernelTable<T>& kernels();

template <>
const KernelTable<float>& kernels<float>();
template <>
const KernelTable<double>& kernels<double>();

}  // namespace rawvae::simd
