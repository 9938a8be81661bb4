// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/wavelet.hpp"

#include <vector>

#include "prnu/errors.hpp"

namespace prnu::wavelet {

namespace {

constexpr std::array<double, 8> kLow = {
    0.23037781330889650086,  0.71484657055291564709, 0.63088076792985890788, -0.027983769416859854211,
    -0.18703481171909308408, 0.030841381835560763627, 0.032883011666885199735, -0.010597401785069032105};

constexpr std::array<double, 8> make_high() {
  std::array<double, 8> g{};
  for (std::size_t k = 0; k < 8; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * kLow[7 - k];
  return g;
}

constexpr std::array<double, 8> kHigh = make_high();

// One periodic analysis step over n samples: first n/2 outputs approximation,
// last n/2 detail.
void analyze(const double* in, double* out, std::size_t n) {
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    if (2 * i + 8 <= n) {
      const double* x = in + 2 * i;
      for (std::size_t k = 0; k < 8; ++k) {
        a += kLow[k] * x[k];
        d += kHigh[k] * x[k];
      }
    } else {
      for (std::size_t k = 0; k < 8; ++k) {
        const double x = in[(2 * i + k) % n];
        a += kLow[k] * x;
        d += kHigh[k] * x;
      }
    }
    out[i] = a;
    out[half + i] = d;
  }
}

void synthesize(const double* in, double* out, std::size_t n) {
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    const double a = in[i], d = in[half + i];
    if (2 * i + 8 <= n) {
      double* y = out + 2 * i;
      for (std::size_t k = 0; k < 8; ++k) y[k] += kLow[k] * a + kHigh[k] * d;
    } else {
      for (std::size_t k = 0; k < 8; ++k) out[(2 * i + k) % n] += kLow[k] * a + kHigh[k] * d;
    }
  }
}

void check_shape(std::size_t h, std::size_t w, int levels) {
  require(levels >= 1, "wavelet: levels must be at least 1");
  const std::size_t block = std::size_t{1} << levels;
  require(h % block == 0 && w % block == 0 && h >= block && w >= block,
          "wavelet: dimensions must be multiples of 2^levels");
}

}  // namespace

const std::array<double, 8>& lowpass() { return kLow; }

ImagePlane forward(const ImagePlane& plane, int levels) {
  check_shape(plane.height(), plane.width(), levels);
  ImagePlane c = plane;
  std::size_t h = plane.height(), w = plane.width();
  std::vector<double> in(std::max(h, w)), out(std::max(h, w));
  for (int level = 0; level < levels; ++level) {
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t j = 0; j < w; ++j) in[j] = c(r, j);
      analyze(in.data(), out.data(), w);
      for (std::size_t j = 0; j < w; ++j) c(r, j) = out[j];
    }
    for (std::size_t j = 0; j < w; ++j) {
      for (std::size_t r = 0; r < h; ++r) in[r] = c(r, j);
      analyze(in.data(), out.data(), h);
      for (std::size_t r = 0; r < h; ++r) c(r, j) = out[r];
    }
    h /= 2;
    w /= 2;
  }
  return c;
}

ImagePlane inverse(const ImagePlane& coefficients, int levels) {
  check_shape(coefficients.height(), coefficients.width(), levels);
  ImagePlane x = coefficients;
  std::vector<double> in(std::max(x.height(), x.width())), out(in.size());
  for (int level = levels - 1; level >= 0; --level) {
    const std::size_t h = x.height() >> level, w = x.width() >> level;
    for (std::size_t j = 0; j < w; ++j) {
      for (std::size_t r = 0; r < h; ++r) in[r] = x(r, j);
      synthesize(in.data(), out.data(), h);
      for (std::size_t r = 0; r < h; ++r) x(r, j) = out[r];
    }
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t j = 0; j < w; ++j) in[j] = x(r, j);
      synthesize(in.data(), out.data(), w);
      for (std::size_t j = 0; j < w; ++j) x(r, j) = out[j];
    }
  }
  return x;
}

std::array<Band, 3> detail_bands(std::size_t height, std::size_t width, int level) {
  const std::size_t bh = height >> level, bw = width >> level;
  return {Band{0, bw, bh, bw}, Band{bh, 0, bh, bw}, Band{bh, bw, bh, bw}};
}

}  // namespace prnu::wavelet
