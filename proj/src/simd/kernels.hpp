// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace prnu::simd::detail {

void mul_scalar(const double* a, const double* b, double* out, std::size_t n);
void accumulate_weighted_scalar(const double* q, const double* w, double* num, double* den, std::size_t n);
double dot_scalar(const double* a, const double* b, std::size_t n);
void cross_spectrum_scalar(const double* a, const double* b, double* out, std::size_t n);
void scale_scalar(double* a, double s, std::size_t n);

#if defined(PRNU_HAVE_AVX2)
void mul_avx2(const double* a, const double* b, double* out, std::size_t n);
void accumulate_weighted_avx2(const double* q, const double* w, double* num, double* den, std::size_t n);
double dot_avx2(const double* a, const double* b, std::size_t n);
void cross_spectrum_avx2(const double* a, const double* b, double* out, std::size_t n);
void scale_avx2(double* a, double s, std::size_t n);
#endif

}  // namespace prnu::simd::detail
