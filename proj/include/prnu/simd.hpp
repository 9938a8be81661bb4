// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

// Pixel-parallel inner loops. Each kernel has a scalar reference and, on
// x86-64, an AVX2 variant picked once at startup from CPUID. Element-wise
// kernels are bit-identical across variants (no FMA contraction); the
// reductions differ only in summation order.
namespace prnu::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // out[i] = a[i] * b[i]
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // num[i] += q[i] * w[i]; den[i] += q[i] * q[i]
  void (*accumulate_weighted)(const double* q, const double* w, double* num, double* den, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // Interleaved complex arrays of n elements: out = conj(a) * b.
  void (*cross_spectrum)(const double* a, const double* b, double* out, std::size_t n);
  void (*scale)(double* a, double s, std::size_t n);
};

const KernelTable& scalar_kernels();

/// The AVX2 table, or nullopt when it was not compiled in or the CPU lacks AVX2.
std::optional<const KernelTable*> avx2_kernels();

/// Table used by the free functions below. Chosen on first use; setting the
/// environment variable PRNU_SIMD=scalar forces the reference kernels.
const KernelTable& active();
void set_active(Isa isa);
std::string_view isa_name(Isa isa);

inline void mul(const double* a, const double* b, double* out, std::size_t n) { active().mul(a, b, out, n); }
inline void accumulate_weighted(const double* q, const double* w, double* num, double* den, std::size_t n) {
  active().accumulate_weighted(q, w, num, den, n);
}
inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void cross_spectrum(const double* a, const double* b, double* out, std::size_t n) {
  active().cross_spectrum(a, b, out, n);
}
inline void scale(double* a, double s, std::size_t n) { active().scale(a, s, n); }

}  // namespace prnu::simd
