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
#pragma once

// Float kernels used by every hot loop in the engine (MaxSim, k-means
// assignment, ADC scans). Each backend implements the same table; the
// active one is picked once at startup from CPU features and can be forced
// with FBL_SIMD=scalar|avx2|neon.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace fbl::simd {

enum class Backend { kScalar, kAvx2, kNeon };

struct KernelTable {
  Backend backend;
  const char* name;

  float (*dot)(const float* a, const float* b, std::size_t d);
  float (*l2_sqr)(const float* a, const float* b, std::size_t d);

  // y[i] += alpha * x[i]
  void (*axpy)(float alpha, const float* x, float* y, std::size_t n);

  // out[i] = <q, rows[i]> for n row-major rows of width d.
  void (*dot_many)(const float* q, const float* rows, std::size_t n,
                   std::size_t d, float* out);

  // max_i <q, rows[i]>; n >= 1.
  float (*max_dot)(const float* q, const float* rows, std::size_t n,
                   std::size_t d);

  // Lowest index of the minimum of v[0..n); n >= 1.
  std::size_t (*argmin)(const float* v, std::size_t n);

  // out[j] = bias + sum_m table[m * ksub + codes[j * m_count + m]]
  void (*adc_scan)(const float* table, std::size_t m_count, std::size_t ksub,
                   const std::uint8_t* codes, std::size_t n, float bias,
                   float* out);
};

const KernelTable& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_kernels();
#endif
#if defined(__aarch64__)
const KernelTable& neon_kernels();
#endif

/// Backends this binary was compiled with and the CPU can run.
std::vector<const KernelTable*> available_backends();

/// The dispatched table. Selected on first call.
const KernelTable& kernels();

std::string_view backend_name(Backend b);

// Convenience wrappers over the dispatched table.
inline float dot(std::span<const float> a, std::span<const float> b) {
  return kernels().dot(a.data(), b.data(), a.size());
}
inline float l2_sqr(std::span<const float> a, std::span<const float> b) {
  return kernels().l2_sqr(a.data(), b.data(), a.size());
}

}  // namespace fbl::simd
