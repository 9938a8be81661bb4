// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include <immintrin.h>

#include "kernels.hpp"

#if !defined(__AVX2__)
#error "kernels_avx2.cpp must be compiled with -mavx2"
#endif

namespace prnu::simd::detail {

void mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void accumulate_weighted_avx2(const double* q, const double* w, double* num, double* den, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vq = _mm256_loadu_pd(q + i);
    const __m256d vw = _mm256_loadu_pd(w + i);
    _mm256_storeu_pd(num + i, _mm256_add_pd(_mm256_loadu_pd(num + i), _mm256_mul_pd(vq, vw)));
    _mm256_storeu_pd(den + i, _mm256_add_pd(_mm256_loadu_pd(den + i), _mm256_mul_pd(vq, vq)));
  }
  for (; i < n; ++i) {
    num[i] += q[i] * w[i];
    den[i] += q[i] * q[i];
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void cross_spectrum_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * i);  // ar0 ai0 ar1 ai1
    const __m256d vb = _mm256_loadu_pd(b + 2 * i);  // br0 bi0 br1 bi1
    const __m256d straight = _mm256_mul_pd(va, vb);                            // ar*br, ai*bi
    const __m256d crossed = _mm256_mul_pd(va, _mm256_permute_pd(vb, 0b0101));  // ar*bi, ai*br
    const __m256d re = _mm256_hadd_pd(straight, straight);
    const __m256d im = _mm256_hsub_pd(crossed, crossed);
    _mm256_storeu_pd(out + 2 * i, _mm256_blend_pd(re, im, 0b1010));
  }
  for (; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    out[2 * i] = ar * br + ai * bi;
    out[2 * i + 1] = ar * bi - ai * br;
  }
}

void scale_avx2(double* a, double s, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(a + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vs));
  for (; i < n; ++i) a[i] *= s;
}

}  // namespace prnu::simd::detail
