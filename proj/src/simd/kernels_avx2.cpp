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

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "kernels_avx2.hpp"

namespace rawvae::simd::avx2 {
namespace {

constexpr std::size_t kLanes = 8;

inline float hsum(__m256 v) {
  const __m128 lo = _mm256_castps256_ps128(v);
  const __m128 hi = _mm256_extractf128_ps(v, 1);
  __m128 s = _mm_add_ps(lo, hi);
  s = _mm_add_ps(s, _mm_movehl_ps(s, s));
  s = _mm_add_ss(s, _mm_movehdup_ps(s));
  return _mm_cvtss_f32(s);
}

// One (sample, row) dot product. The blocked kernel below reproduces this
// exact sequence per pair.
inline float dot_one(const float* x, const float* w, std::size_t in,
                     std::size_t body) {
  __m256 acc = _mm256_setzero_ps();
  for (std::size_t k = 0; k < body; k += kLanes) {
    acc = _mm256_fmadd_ps(_mm256_loadu_ps(x + k), _mm256_loadu_ps(w + k), acc);
  }
  float s = hsum(acc);
  for (std::size_t k = body; k < in; ++k) s += x[k] * w[k];
  return s;
}

inline void finish_pair(__m256 acc, const float* x, const float* w,
                        std::size_t in, std::size_t body, float bias, float* y) {
  float s = hsum(acc);
  for (std::size_t k = body; k < in; ++k) s += x[k] * w[k];
  *y = s + bias;
}

}  // namespace

void affine_forward(const float* x, std::size_t n, std::size_t in,
                    const float* w, const float* b, std::size_t out, float* y) {
  constexpr std::size_t kRows = 4;
  constexpr std::size_t kSamples = 2;
  const std::size_t body = in - in % kLanes;
  const std::size_t row_blocks = out - out % kRows;
  const std::size_t sample_blocks = n - n % kSamples;

  // Row blocks outermost so each 4-row weight panel stays hot while every
  // sample streams past it.
  for (std::size_t o = 0; o < row_blocks; o += kRows) {
    const float* w0 = w + (o + 0) * in;
    const float* w1 = w + (o + 1) * in;
    const float* w2 = w + (o + 2) * in;
    const float* w3 = w + (o + 3) * in;
    for (std::size_t s = 0; s < sample_blocks; s += kSamples) {
      const float* xa = x + s * in;
      const float* xb = xa + in;
      __m256 a0 = _mm256_setzero_ps(), a1 = _mm256_setzero_ps();
      __m256 a2 = _mm256_setzero_ps(), a3 = _mm256_setzero_ps();
      __m256 b0 = _mm256_setzero_ps(), b1 = _mm256_setzero_ps();
      __m256 b2 = _mm256_setzero_ps(), b3 = _mm256_setzero_ps();
      for (std::size_t k = 0; k < body; k += kLanes) {
        const __m256 va = _mm256_loadu_ps(xa + k);
        const __m256 vb = _mm256_loadu_ps(xb + k);
        const __m256 v0 = _mm256_loadu_ps(w0 + k);
        const __m256 v1 = _mm256_loadu_ps(w1 + k);
        const __m256 v2 = _mm256_loadu_ps(w2 + k);
        const __m256 v3 = _mm256_loadu_ps(w3 + k);
        a0 = _mm256_fmadd_ps(va, v0, a0);
        a1 = _mm256_fmadd_ps(va, v1, a1);
        a2 = _mm256_fmadd_ps(va, v2, a2);
        a3 = _mm256_fmadd_ps(va, v3, a3);
        b0 = _mm256_fmadd_ps(vb, v0, b0);
        b1 = _mm256_fmadd_ps(vb, v1, b1);
        b2 = _mm256_fmadd_ps(vb, v2, b2);
        b3 = _mm256_fmadd_ps(vb, v3, b3);
      }
      float* ya = y + s * out + o;
      float* yb = ya + out;
      finish_pair(a0, xa, w0, in, body, b[o + 0], ya + 0);
      finish_pair(a1, xa, w1, in, body, b[o + 1], ya + 1);
      finish_pair(a2, xa, w2, in, body, b[o + 2], ya + 2);
      finish_pair(a3, xa, w3, in, body, b[o + 3], ya + 3);
      finish_pair(b0, xb, w0, in, body, b[o + 0], yb + 0);
      finish_pair(b1, xb, w1, in, body, b[o + 1], yb + 1);
      finish_pair(b2, xb, w2, in, body, b[o + 2], yb + 2);
      finish_pair(b3, xb, w3, in, body, b[o + 3], yb + 3);
    }
    for (std::size_t s = sample_blocks; s < n; ++s) {
      for (std::size_t r = 0; r < kRows; ++r) {
        y[s * out + o + r] =
            dot_one(x + s * in, w + (o + r) * in, in, body) + b[o + r];
      }
    }
  }
  for (std::size_t o = row_blocks; o < out; ++o) {
    for (std::size_t s = 0; s < n; ++s) {
      y[s * out + o] = dot_one(x + s * in, w + o * in, in, body) + b[o];
    }
  }
}

void backprop_input(const float* dy, std::size_t n, std::size_t out,
                    const float* w, std::size_t in, float* dx) {
  constexpr std::size_t kStrip = 4 * kLanes;
  const std::size_t strips = in - in % kStrip;
  const std::size_t body = in - in % kLanes;
  const std::size_t pairs = n - n % 2;

  for (std::size_t k = 0; k < strips; k += kStrip) {
    for (std::size_t s = 0; s < pairs; s += 2) {
      const float* ga = dy + s * out;
      const float* gb = ga + out;
      __m256 a0 = _mm256_setzero_ps(), a1 = _mm256_setzero_ps();
      __m256 a2 = _mm256_setzero_ps(), a3 = _mm256_setzero_ps();
      __m256 b0 = _mm256_setzero_ps(), b1 = _mm256_setzero_ps();
      __m256 b2 = _mm256_setzero_ps(), b3 = _mm256_setzero_ps();
      for (std::size_t o = 0; o < out; ++o) {
        const float* wo = w + o * in + k;
        const __m256 w0 = _mm256_loadu_ps(wo);
        const __m256 w1 = _mm256_loadu_ps(wo + 8);
        const __m256 w2 = _mm256_loadu_ps(wo + 16);
        const __m256 w3 = _mm256_loadu_ps(wo + 24);
        const __m256 ca = _mm256_broadcast_ss(ga + o);
        const __m256 cb = _mm256_broadcast_ss(gb + o);
        a0 = _mm256_fmadd_ps(ca, w0, a0);
        a1 = _mm256_fmadd_ps(ca, w1, a1);
        a2 = _mm256_fmadd_ps(ca, w2, a2);
        a3 = _mm256_fmadd_ps(ca, w3, a3);
        b0 = _mm256_fmadd_ps(cb, w0, b0);
        b1 = _mm256_fmadd_ps(cb, w1, b1);
        b2 = _mm256_fmadd_ps(cb, w2, b2);
        b3 = _mm256_fmadd_ps(cb, w3, b3);
      }
      float* da = dx + s * in + k;
      float* db = da + in;
      _mm256_storeu_ps(da, a0);
      _mm256_storeu_ps(da + 8, a1);
      _mm256_storeu_ps(da + 16, a2);
      _mm256_storeu_ps(da + 24, a3);
      _mm256_storeu_ps(db, b0);
      _mm256_storeu_ps(db + 8, b1);
      _mm256_storeu_ps(db + 16, b2);
      _mm256_storeu_ps(db + 24, b3);
    }
  }
  // Leftover samples, and columns outside the 32-wide strips, use the same
  // per-element fma chain over o.
  for (std::size_t s = 0; s < n; ++s) {
    const float* g = dy + s * out;
    const std::size_t k_begin = s < pairs ? strips : 0;
    for (std::size_t k = k_begin; k < body; k += kLanes) {
      __m256 acc = _mm256_setzero_ps();
      for (std::size_t o = 0; o < out; ++o) {
        acc = _mm256_fmadd_ps(_mm256_broadcast_ss(g + o),
                              _mm256_loadu_ps(w + o * in + k), acc);
      }
      _mm256_storeu_ps(dx + s * in + k, acc);
    }
    for (std::size_t k = body; k < in; ++k) {
      float acc = 0.0f;
      for (std::size_t o = 0; o < out; ++o) acc += g[o] * w[o * in + k];
      dx[s * in + k] = acc;
    }
  }
}

void accumulate_weight_grad(const float* dy, std::size_t n, std::size_t out,
                            const float* x, std::size_t in, float* dw,
                            float* db) {
  constexpr std::size_t kStrip = 4 * kLanes;
  const std::size_t strips = in - in % kStrip;
  const std::size_t body = in - in % kLanes;
  const std::size_t row_pairs = out - out % 2;

  for (std::size_t k = 0; k < strips; k += kStrip) {
    for (std::size_t o = 0; o < row_pairs; o += 2) {
      float* da = dw + o * in + k;
      float* dc = da + in;
      __m256 a0 = _mm256_loadu_ps(da), a1 = _mm256_loadu_ps(da + 8);
      __m256 a2 = _mm256_loadu_ps(da + 16), a3 = _mm256_loadu_ps(da + 24);
      __m256 c0 = _mm256_loadu_ps(dc), c1 = _mm256_loadu_ps(dc + 8);
      __m256 c2 = _mm256_loadu_ps(dc + 16), c3 = _mm256_loadu_ps(dc + 24);
      for (std::size_t s = 0; s < n; ++s) {
        const float* xs = x + s * in + k;
        const __m256 x0 = _mm256_loadu_ps(xs);
        const __m256 x1 = _mm256_loadu_ps(xs + 8);
        const __m256 x2 = _mm256_loadu_ps(xs + 16);
        const __m256 x3 = _mm256_loadu_ps(xs + 24);
        const __m256 ga = _mm256_broadcast_ss(dy + s * out + o);
        const __m256 gc = _mm256_broadcast_ss(dy + s * out + o + 1);
        a0 = _mm256_fmadd_ps(ga, x0, a0);
        a1 = _mm256_fmadd_ps(ga, x1, a1);
        a2 = _mm256_fmadd_ps(ga, x2, a2);
        a3 = _mm256_fmadd_ps(ga, x3, a3);
        c0 = _mm256_fmadd_ps(gc, x0, c0);
        c1 = _mm256_fmadd_ps(gc, x1, c1);
        c2 = _mm256_fmadd_ps(gc, x2, c2);
        c3 = _mm256_fmadd_ps(gc, x3, c3);
      }
      _mm256_storeu_ps(da, a0);
      _mm256_storeu_ps(da + 8, a1);
      _mm256_storeu_ps(da + 16, a2);
      _mm256_storeu_ps(da + 24, a3);
      _mm256_storeu_ps(dc, c0);
      _mm256_storeu_ps(dc + 8, c1);
      _mm256_storeu_ps(dc + 16, c2);
      _mm256_storeu_ps(dc + 24, c3);
    }
  }
  for (std::size_t o = 0; o < out; ++o) {
    const std::size_t k_begin = o < row_pairs ? strips : 0;
    float* dwo = dw + o * in;
    for (std::size_t k = k_begin; k < body; k += kLanes) {
      __m256 acc = _mm256_loadu_ps(dwo + k);
      for (std::size_t s = 0; s < n; ++s) {
        acc = _mm256_fmadd_ps(_mm256_broadcast_ss(dy + s * out + o),
                              _mm256_loadu_ps(x + s * in + k), acc);
      }
      _mm256_storeu_ps(dwo + k, acc);
    }
    for (std::size_t k = body; k < in; ++k) {
      float acc = dwo[k];
      for (std::size_t s = 0; s < n; ++s) acc += dy[s * out + o] * x[s * in + k];
      dwo[k] = acc;
    }
    float bias = db[o];
    for (std::size_t s = 0; s < n; ++s) bias += dy[s * out + o];
    db[o] = bias;
  }
}

void leaky_relu(const float* x, float* y, std::size_t n, float slope) {
  const std::size_t body = n - n % kLanes;
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 zero = _mm256_setzero_ps();
  for (std::size_t i = 0; i < body; i += kLanes) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256 neg = _mm256_cmp_ps(v, zero, _CMP_LT_OQ);
    _mm256_storeu_ps(y + i, _mm256_blendv_ps(v, _mm256_mul_ps(v, vs), neg));
  }
  for (std::size_t i = body; i < n; ++i) y[i] = x[i] < 0 ? x[i] * slope : x[i];
}

void leaky_relu_backward(const float* pre, float* grad, std::size_t n,
                         float slope) {
  const std::size_t body = n - n % kLanes;
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 zero = _mm256_setzero_ps();
  for (std::size_t i = 0; i < body; i += kLanes) {
    const __m256 g = _mm256_loadu_ps(grad + i);
    const __m256 neg = _mm256_cmp_ps(_mm256_loadu_ps(pre + i), zero, _CMP_LT_OQ);
    _mm256_storeu_ps(grad + i, _mm256_blendv_ps(g, _mm256_mul_ps(g, vs), neg));
  }
  for (std::size_t i = body; i < n; ++i) {
    if (pre[i] < 0) grad[i] *= slope;
  }
}

// No fused multiply-adds here: the update matches the scalar reference bit
// for bit.
void adam_update(float* param, const float* grad, float* m, float* v,
                 std::size_t n, const AdamCoefficients<float>& c) {
  const std::size_t body = n - n % kLanes;
  const __m256 b1 = _mm256_set1_ps(c.beta1);
  const __m256 b2 = _mm256_set1_ps(c.beta2);
  const __m256 omb1 = _mm256_set1_ps(1.0f - c.beta1);
  const __m256 omb2 = _mm256_set1_ps(1.0f - c.beta2);
  const __m256 bc1 = _mm256_set1_ps(c.bias_correction1);
  const __m256 bc2 = _mm256_set1_ps(c.bias_correction2);
  const __m256 lr = _mm256_set1_ps(c.learning_rate);
  const __m256 eps = _mm256_set1_ps(c.epsilon);
  for (std::size_t i = 0; i < body; i += kLanes) {
    const __m256 g = _mm256_loadu_ps(grad + i);
    const __m256 mi = _mm256_add_ps(_mm256_mul_ps(b1, _mm256_loadu_ps(m + i)),
                                    _mm256_mul_ps(omb1, g));
    const __m256 vi = _mm256_add_ps(_mm256_mul_ps(b2, _mm256_loadu_ps(v + i)),
                                    _mm256_mul_ps(omb2, _mm256_mul_ps(g, g)));
    _mm256_storeu_ps(m + i, mi);
    _mm256_storeu_ps(v + i, vi);
    const __m256 m_hat = _mm256_div_ps(mi, bc1);
    const __m256 v_hat = _mm256_div_ps(vi, bc2);
    const __m256 step = _mm256_div_ps(_mm256_mul_ps(lr, m_hat),
                                      _mm256_add_ps(_mm256_sqrt_ps(v_hat), eps));
    _mm256_storeu_ps(param + i, _mm256_sub_ps(_mm256_loadu_ps(param + i), step));
  }
  const float one_minus_b1 = 1.0f - c.beta1;
  const float one_minus_b2 = 1.0f - c.beta2;
  for (std::size_t i = body; i < n; ++i) {
    const float g = grad[i];
    m[i] = c.beta1 * m[i] + one_minus_b1 * g;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g * g);
    const float m_hat = m[i] / c.bias_correction1;
    const float v_hat = v[i] / c.bias_correction2;
    param[i] = param[i] - c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

float squared_distance(const float* a, const float* b, std::size_t n) {
  const std::size_t body = n - n % kLanes;
  __m256 acc = _mm256_setzero_ps();
  for (std::size_t i = 0; i < body; i += kLanes) {
    const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
    acc = _mm256_fmadd_ps(d, d, acc);
  }
  float s = hsum(acc);
  for (std::size_t i = body; i < n; ++i) {
    const float d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

KernelTable<float> make_table() {
  return KernelTable<float>{
      Backend::kAvx2,       &affine_forward,
      &backprop_input,      &accumulate_weight_grad,
      &leaky_relu,          &leaky_relu_backward,
      &adam_update,         &squared_distance,
  };
}

}  // namespace rawvae::simd::avx2
