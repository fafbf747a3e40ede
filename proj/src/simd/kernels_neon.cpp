// Copyright 2026 The fbl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// AArch64 only; NEON is mandatory there so no runtime probe is needed.

#include <arm_neon.h>

#include <limits>

#include "fbl/simd/kernels.hpp"

namespace fbl::simd {
namespace {

float dot_neon(const float* a, const float* b, std::size_t d) {
  float32x4_t acc0 = vdupq_n_f32(0.0f);
  float32x4_t acc1 = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 8 <= d; i += 8) {
    acc0 = vfmaq_f32(acc0, vld1q_f32(a + i), vld1q_f32(b + i));
    acc1 = vfmaq_f32(acc1, vld1q_f32(a + i + 4), vld1q_f32(b + i + 4));
  }
  if (i + 4 <= d) {
    acc0 = vfmaq_f32(acc0, vld1q_f32(a + i), vld1q_f32(b + i));
    i += 4;
  }
  float s = vaddvq_f32(vaddq_f32(acc0, acc1));
  for (; i < d; ++i) s += a[i] * b[i];
  return s;
}

float l2_sqr_neon(const float* a, const float* b, std::size_t d) {
  float32x4_t acc = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 4 <= d; i += 4) {
    const float32x4_t t = vsubq_f32(vld1q_f32(a + i), vld1q_f32(b + i));
    acc = vfmaq_f32(acc, t, t);
  }
  float s = vaddvq_f32(acc);
  for (; i < d; ++i) {
    const float t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

void axpy_neon(float alpha, const float* x, float* y, std::size_t n) {
  const float32x4_t va = vdupq_n_f32(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    vst1q_f32(y + i, vfmaq_f32(vld1q_f32(y + i), va, vld1q_f32(x + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void dot_many_neon(const float* q, const float* rows, std::size_t n,
                   std::size_t d, float* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = dot_neon(q, rows + i * d, d);
}

float max_dot_neon(const float* q, const float* rows, std::size_t n,
                   std::size_t d) {
  float best = -std::numeric_limits<float>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const float s = dot_neon(q, rows + i * d, d);
    if (s > best) best = s;
  }
  return best;
}

std::size_t argmin_neon(const float* v, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

// No gather on NEON; four independent accumulators keep the lookups
// pipelined.
void adc_scan_neon(const float* table, std::size_t m_count, std::size_t ksub,
                   const std::uint8_t* codes, std::size_t n, float bias,
                   float* out) {
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint8_t* c = codes + j * m_count;
    float s0 = 0.0f, s1 = 0.0f, s2 = 0.0f, s3 = 0.0f;
    std::size_t m = 0;
    for (; m + 4 <= m_count; m += 4) {
      s0 += table[m * ksub + c[m]];
      s1 += table[(m + 1) * ksub + c[m + 1]];
      s2 += table[(m + 2) * ksub + c[m + 2]];
      s3 += table[(m + 3) * ksub + c[m + 3]];
    }
    for (; m < m_count; ++m) s0 += table[m * ksub + c[m]];
    out[j] = bias + ((s0 + s1) + (s2 + s3));
  }
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{
      Backend::kNeon, "neon",       dot_neon,    l2_sqr_neon,  axpy_neon,
      dot_many_neon,  max_dot_neon, argmin_neon, adc_scan_neon,
  };
  return table;
}

}  // namespace fbl::simd
