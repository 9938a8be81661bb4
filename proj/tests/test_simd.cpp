// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "prnu/detection.hpp"
#include "prnu/fingerprint.hpp"
#include "prnu/simd.hpp"
#include "support.hpp"

using namespace prnu;

namespace {

std::vector<double> noise(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

const simd::KernelTable* avx2_or_skip() {
  const auto t = simd::avx2_kernels();
  if (!t) MESSAGE("AVX2 kernels unavailable on this build or CPU; equivalence checks skipped");
  return t.value_or(nullptr);
}

}  // namespace

TEST_CASE("element-wise kernels are bit-identical") {
  const simd::KernelTable& ref = simd::scalar_kernels();
  const simd::KernelTable* fast = avx2_or_skip();
  if (!fast) return;
  CHECK(fast->isa == simd::Isa::avx2);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 64u, 1001u}) {
    const auto a = noise(n, n), b = noise(n + 1000, n);
    std::vector<double> o1(n), o2(n);
    ref.mul(a.data(), b.data(), o1.data(), n);
    fast->mul(a.data(), b.data(), o2.data(), n);
    CHECK(o1 == o2);

    auto n1 = noise(n + 2000, n), d1 = noise(n + 3000, n);
    auto n2 = n1, d2 = d1;
    ref.accumulate_weighted(a.data(), b.data(), n1.data(), d1.data(), n);
    fast->accumulate_weighted(a.data(), b.data(), n2.data(), d2.data(), n);
    CHECK(n1 == n2);
    CHECK(d1 == d2);

    auto s1 = a, s2 = a;
    ref.scale(s1.data(), -0.37, n);
    fast->scale(s2.data(), -0.37, n);
    CHECK(s1 == s2);

    // Complex arrays: 2n doubles each.
    const auto ca = noise(n + 4000, 2 * n), cb = noise(n + 5000, 2 * n);
    std::vector<double> c1(2 * n), c2(2 * n);
    ref.cross_spectrum(ca.data(), cb.data(), c1.data(), n);
    fast->cross_spectrum(ca.data(), cb.data(), c2.data(), n);
    CHECK(c1 == c2);
  }
}

TEST_CASE("cross_spectrum computes conj(a) * b") {
  const double a[] = {1.0, 2.0, -0.5, 0.25};
  const double b[] = {3.0, -1.0, 2.0, 2.0};
  double out[4];
  simd::scalar_kernels().cross_spectrum(a, b, out, 2);
  // (1 - 2i)(3 - i) = 1 - 7i; (-0.5 - 0.25i)(2 + 2i) = -0.5 - 1.5i
  CHECK(out[0] == 1.0);
  CHECK(out[1] == -7.0);
  CHECK(out[2] == -0.5);
  CHECK(out[3] == -1.5);
}

TEST_CASE("dot agrees to rounding") {
  const simd::KernelTable& ref = simd::scalar_kernels();
  const simd::KernelTable* fast = avx2_or_skip();
  if (!fast) return;
  for (std::size_t n : {0u, 1u, 5u, 8u, 33u, 4096u}) {
    const auto a = noise(n + 7, n), b = noise(n + 8, n);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
    CHECK(std::abs(ref.dot(a.data(), b.data(), n) - fast->dot(a.data(), b.data(), n)) <= 1e-14 * (mag + 1.0));
  }
}

TEST_CASE("pipeline results match under both kernel tables") {
  if (!avx2_or_skip()) return;
  std::vector<ResidualPair> pairs(4);
  for (std::size_t l = 0; l < pairs.size(); ++l)
    pairs[l] = {oracle::gaussian_plane(10 + l, 64, 64), oracle::uniform_plane(20 + l, 64, 64), false};
  const auto scheme = WeightScheme::fixed_parabola();
  const ImagePlane x = oracle::uniform_plane(30, 16, 16);
  const ImagePlane w = oracle::gaussian_plane(31, 16, 16);

  simd::set_active(simd::Isa::scalar);
  CHECK(simd::active().isa == simd::Isa::scalar);
  const auto fp1 = estimate_fingerprint(pairs, scheme);
  const auto s1 = align_and_score(fp1, scheme.plane(x), w);
  simd::set_active(simd::Isa::avx2);
  CHECK(simd::active().isa == simd::Isa::avx2);
  const auto fp2 = estimate_fingerprint(pairs, scheme);
  const auto s2 = align_and_score(fp2, scheme.plane(x), w);

  CHECK(fp1.plane == fp2.plane);
  CHECK(s1.shift == s2.shift);
  CHECK(s1.pce == doctest::Approx(s2.pce).epsilon(1e-12));
  CHECK(simd::isa_name(simd::Isa::avx2) == "avx2");
  CHECK(simd::isa_name(simd::Isa::scalar) == "scalar");
}
