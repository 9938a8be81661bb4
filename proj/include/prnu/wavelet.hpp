// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>

#include "prnu/image.hpp"

// Orthogonal 8-tap Daubechies transform with periodic boundaries. The
// decomposition is stored in Mallat layout: after `levels` steps the
// top-left (h >> levels) x (w >> levels) block holds the approximation.
namespace prnu::wavelet {

struct Band {
  std::size_t row0 = 0;
  std::size_t col0 = 0;
  std::size_t height = 0;
  std::size_t width = 0;
};

/// Low-pass analysis filter (sums to sqrt(2), unit norm).
const std::array<double, 8>& lowpass();

/// Both dimensions must be divisible by 2^levels.
ImagePlane forward(const ImagePlane& plane, int levels);
ImagePlane inverse(const ImagePlane& coefficients, int levels);

/// The three detail bands (LH, HL, HH) of `level` (1 = finest) for an
/// h x w decomposition.
std::array<Band, 3> detail_bands(std::size_t height, std::size_t width, int level);

}  // namespace prnu::wavelet
