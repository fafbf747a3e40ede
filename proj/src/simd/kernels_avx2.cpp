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

// Compiled with -mavx2 -mfma. Nothing in here may run before the dispatcher
// has confirmed CPU support.

#include <immintrin.h>

#include <limits>

#include "fbl/simd/kernels.hpp"

namespace fbl::simd {
namespace {

inline float hsum256(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 shuf = _mm_movehdup_ps(lo);
  __m128 sums = _mm_add_ps(lo, shuf);
  shuf = _mm_movehl_ps(shuf, sums);
  sums = _mm_add_ss(sums, shuf);
  return _mm_cvtss_f32(sums);
}

float dot_avx2(const float* a, const float* b, std::size_t d) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 16 <= d; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8),
                           _mm256_loadu_ps(b + i + 8), acc1);
  }
  if (i + 8 <= d) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    i += 8;
  }
  float s = hsum256(_mm256_add_ps(acc0, acc1));
  for (; i < d; ++i) s += a[i] * b[i];
  return s;
}

float l2_sqr_avx2(const float* a, const float* b, std::size_t d) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 16 <= d; i += 16) {
    const __m256 t0 = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
    const __m256 t1 =
        _mm256_sub_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8));
    acc0 = _mm256_fmadd_ps(t0, t0, acc0);
    acc1 = _mm256_fmadd_ps(t1, t1, acc1);
  }
  if (i + 8 <= d) {
    const __m256 t0 = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
    acc0 = _mm256_fmadd_ps(t0, t0, acc0);
    i += 8;
  }
  float s = hsum256(_mm256_add_ps(acc0, acc1));
  for (; i < d; ++i) {
    const float t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

void axpy_avx2(float alpha, const float* x, float* y, std::size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i),
                                            _mm256_loadu_ps(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void dot_many_avx2(const float* q, const float* rows, std::size_t n,
                   std::size_t d, float* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = dot_avx2(q, rows + i * d, d);
}

float max_dot_avx2(const float* q, const float* rows, std::size_t n,
                   std::size_t d) {
  float best = -std::numeric_limits<float>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const float s = dot_avx2(q, rows + i * d, d);
    if (s > best) best = s;
  }
  return best;
}

// Per-lane running minimum keeps the first occurrence (strict compare), so
// the final lane reduction only has to break ties by index.
std::size_t argmin_avx2(const float* v, std::size_t n) {
  if (n < 16) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (v[i] < v[best]) best = i;
    }
    return best;
  }
  __m256 best_v = _mm256_loadu_ps(v);
  __m256i best_i = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
  __m256i idx = best_i;
  const __m256i step = _mm256_set1_epi32(8);
  std::size_t i = 8;
  for (; i + 8 <= n; i += 8) {
    idx = _mm256_add_epi32(idx, step);
    const __m256 x = _mm256_loadu_ps(v + i);
    const __m256 lt = _mm256_cmp_ps(x, best_v, _CMP_LT_OQ);
    best_v = _mm256_blendv_ps(best_v, x, lt);
    best_i = _mm256_castps_si256(
        _mm256_blendv_ps(_mm256_castsi256_ps(best_i), _mm256_castsi256_ps(idx), lt));
  }
  alignas(32) float vals[8];
  alignas(32) std::int32_t ids[8];
  _mm256_store_ps(vals, best_v);
  _mm256_store_si256(reinterpret_cast<__m256i*>(ids), best_i);
  std::size_t best = static_cast<std::size_t>(ids[0]);
  float best_val = vals[0];
  for (int l = 1; l < 8; ++l) {
    const auto li = static_cast<std::size_t>(ids[l]);
    if (vals[l] < best_val || (vals[l] == best_val && li < best)) {
      best_val = vals[l];
      best = li;
    }
  }
  for (; i < n; ++i) {
    if (v[i] < best_val) {
      best_val = v[i];
      best = i;
    }
  }
  return best;
}

void adc_scan_avx2(const float* table, std::size_t m_count, std::size_t ksub,
                   const std::uint8_t* codes, std::size_t n, float bias,
                   float* out) {
  const std::size_t m_vec = m_count - m_count % 8;
  const __m256i lane = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
  const __m256i stride = _mm256_set1_epi32(static_cast<int>(ksub));
  const __m256i lane_base = _mm256_mullo_epi32(lane, stride);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint8_t* c = codes + j * m_count;
    __m256 acc = _mm256_setzero_ps();
    for (std::size_t m = 0; m < m_vec; m += 8) {
      const __m128i raw = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(c + m));
      const __m256i idx = _mm256_add_epi32(lane_base, _mm256_cvtepu8_epi32(raw));
      acc = _mm256_add_ps(acc, _mm256_i32gather_ps(table + m * ksub, idx, 4));
    }
    float s = hsum256(acc);
    for (std::size_t m = m_vec; m < m_count; ++m) s += table[m * ksub + c[m]];
    out[j] = bias + s;
  }
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{
      Backend::kAvx2, "avx2",       dot_avx2,    l2_sqr_avx2,  axpy_avx2,
      dot_many_avx2,  max_dot_avx2, argmin_avx2, adc_scan_avx2,
  };
  return table;
}

}  // namespace fbl::simd
