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
#include <limits>

#include "fbl/simd/kernels.hpp"

namespace fbl::simd {
namespace {

float dot_scalar(const float* a, const float* b, std::size_t d) {
  float s = 0.0f;
  for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

float l2_sqr_scalar(const float* a, const float* b, std::size_t d) {
  float s = 0.0f;
  for (std::size_t i = 0; i < d; ++i) {
    const float t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

void axpy_scalar(float alpha, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void dot_many_scalar(const float* q, const float* rows, std::size_t n,
                     std::size_t d, float* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = dot_scalar(q, rows + i * d, d);
}

float max_dot_scalar(const float* q, const float* rows, std::size_t n,
                     std::size_t d) {
  float best = -std::numeric_limits<float>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const float s = dot_scalar(q, rows + i * d, d);
    if (s > best) best = s;
  }
  return best;
}

std::size_t argmin_scalar(const float* v, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

void adc_scan_scalar(const float* table, std::size_t m_count, std::size_t ksub,
                     const std::uint8_t* codes, std::size_t n, float bias,
                     float* out) {
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint8_t* c = codes + j * m_count;
    float s = 0.0f;
    for (std::size_t m = 0; m < m_count; ++m) s += table[m * ksub + c[m]];
    out[j] = bias + s;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      Backend::kScalar, "scalar",       dot_scalar,    l2_sqr_scalar,  axpy_scalar,
      dot_many_scalar,  max_dot_scalar, argmin_scalar, adc_scan_scalar,
  };
  return table;
}

}  // namespace fbl::simd
