// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels.hpp"
#include "prnu/errors.hpp"
#include "prnu/simd.hpp"

namespace prnu::simd {

namespace {

constexpr KernelTable kScalar{Isa::scalar,
                              detail::mul_scalar,
                              detail::accumulate_weighted_scalar,
                              detail::dot_scalar,
                              detail::cross_spectrum_scalar,
                              detail::scale_scalar};

#if defined(PRNU_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2,
                            detail::mul_avx2,
                            detail::accumulate_weighted_avx2,
                            detail::dot_avx2,
                            detail::cross_spectrum_avx2,
                            detail::scale_avx2};
#endif

bool cpu_has_avx2() {
#if defined(PRNU_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* pick_default() {
  if (const char* env = std::getenv("PRNU_SIMD"); env != nullptr && std::string(env) == "scalar") return &kScalar;
#if defined(PRNU_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

std::optional<const KernelTable*> avx2_kernels() {
#if defined(PRNU_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return std::nullopt;
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_active(Isa isa) {
  if (isa == Isa::scalar) {
    slot().store(&kScalar, std::memory_order_release);
    return;
  }
  const auto avx2 = avx2_kernels();
  require(avx2.has_value(), "AVX2 kernels are not available on this build or CPU");
  slot().store(*avx2, std::memory_order_release);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace prnu::simd
