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

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_scalar.hpp"
#include "rawvae/error.hpp"
#include "rawvae/simd/kernels.hpp"

#if defined(RAWVAE_HAVE_AVX2)
#include "kernels_avx2.hpp"
#endif

namespace rawvae::simd {
namespace {

const KernelTable<float> kScalarF32 = scalar::make_table<float>();
const KernelTable<double> kScalarF64 = scalar::make_table<double>();
#if defined(RAWVAE_HAVE_AVX2)
const KernelTable<float> kAvx2F32 = avx2::make_table();
#endif

bool cpu_has_avx2() {
#if defined(RAWVAE_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported;
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("RAWVAE_KERNELS")) {
    if (std::string(env) == "scalar") return Backend::kScalar;
  }
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

bool backend_available(Backend backend) {
  return backend == Backend::kScalar || cpu_has_avx2();
}

Backend active_backend() { return current().load(); }

void set_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(backend_name(backend)) + " kernels are not available");
  }
  current().store(backend);
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

const KernelTable<float>& table_for(Backend backend) {
#if defined(RAWVAE_HAVE_AVX2)
  if (backend == Backend::kAvx2 && cpu_has_avx2()) return kAvx2F32;
#endif
  (void)backend;
  return kScalarF32;
}

template <>
const KernelTable<float>& kernels<float>() {
  return table_for(active_backend());
}

template <>
const KernelTable<double>& kernels<double>() {
  return kScalarF64;
}

}  // namespace rawvae::simd
