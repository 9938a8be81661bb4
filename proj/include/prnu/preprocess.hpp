// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "prnu/image.hpp"

namespace prnu {

struct DenoiseParams {
  int levels = 4;
  double sigma0 = 3.0;  // assumed noise std on the 0-255 scale
  std::vector<int> windows{3, 5, 7, 9};

  void validate() const;
  double sigma0_unit() const { return sigma0 / 255.0; }
};

/// Denoising residual w and denoised plane x of one capture.
struct ResidualPair {
  ImagePlane residual;
  ImagePlane denoised;
  bool cleaned = false;  // zero_mean + wiener_dft applied to the residual
};

/// Wavelet-domain local Wiener denoiser. Each detail coefficient is scaled by
/// v / (v + s0^2), where v is the smallest over the window list of
/// max(0, local mean of coeff^2 - s0^2). The approximation band is untouched.
/// Dimensions that are not multiples of 2^levels are mirror-padded.
ResidualPair denoise(const ImagePlane& capture, const DenoiseParams& params);

/// BT.601 luma weights.
ImagePlane rgb_to_gray(const ImagePlane& r, const ImagePlane& g, const ImagePlane& b);

/// Subtracts every row mean, then every column mean.
ImagePlane zero_mean(const ImagePlane& residual);

/// Suppresses spectral peaks (periodic artifacts) while passing a flat
/// spectrum: every AC coefficient is scaled by s2 / max(s2, P_local), where s2
/// is median(|F|^2/N) / ln 2 and P_local the smallest periodic box mean of
/// |F|^2/N over the 3, 5, 7 and 9 windows. DC is removed.
ImagePlane wiener_dft(const ImagePlane& residual);

/// Full pipeline for one capture given as one (gray) or three (RGB) planes:
/// per-channel denoise, gray conversion of residuals and denoised planes,
/// then zero_mean + wiener_dft on the residual when `clean` is set.
ResidualPair extract_residual(std::span<const ImagePlane> channels, const DenoiseParams& params, bool clean);

}  // namespace prnu
