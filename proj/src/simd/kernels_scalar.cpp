// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels.hpp"

namespace prnu::simd::detail {

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void accumulate_weighted_scalar(const double* q, const double* w, double* num, double* den, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    num[i] += q[i] * w[i];
    den[i] += q[i] * q[i];
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void cross_spectrum_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    out[2 * i] = ar * br + ai * bi;
    out[2 * i + 1] = ar * bi - ai * br;
  }
}

void scale_scalar(double* a, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= s;
}

}  // namespace prnu::simd::detail
