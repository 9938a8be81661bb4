// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "prnu/errors.hpp"
#include "prnu/spectral.hpp"
#include "prnu/wavelet.hpp"

namespace prnu {

namespace {

std::size_t round_up(std::size_t n, std::size_t block) { return (n + block - 1) / block * block; }

ImagePlane mirror_pad(const ImagePlane& in, std::size_t h, std::size_t w) {
  if (h == in.height() && w == in.width()) return in;
  ImagePlane out(h, w);
  const auto reflect = [](std::size_t i, std::size_t n) { return i < n ? i : 2 * n - 1 - i; };
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) out(r, c) = in(reflect(r, in.height()), reflect(c, in.width()));
  return out;
}

// Shrinks one detail band in place.
void shrink_band(ImagePlane& coeffs, const wavelet::Band& band, double noise_var, const std::vector<int>& windows) {
  const std::size_t bh = band.height, bw = band.width;
  // Summed-area table of squared coefficients, (bh+1) x (bw+1).
  std::vector<double> sat((bh + 1) * (bw + 1), 0.0);
  for (std::size_t r = 0; r < bh; ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < bw; ++c) {
      const double v = coeffs(band.row0 + r, band.col0 + c);
      row += v * v;
      sat[(r + 1) * (bw + 1) + c + 1] = sat[r * (bw + 1) + c + 1] + row;
    }
  }
  for (std::size_t r = 0; r < bh; ++r) {
    for (std::size_t c = 0; c < bw; ++c) {
      double best = HUGE_VAL;
      for (int win : windows) {
        const std::size_t half = static_cast<std::size_t>(win / 2);
        const std::size_t r0 = r >= half ? r - half : 0, r1 = std::min(bh, r + half + 1);
        const std::size_t c0 = c >= half ? c - half : 0, c1 = std::min(bw, c + half + 1);
        const double total = sat[r1 * (bw + 1) + c1] - sat[r0 * (bw + 1) + c1] - sat[r1 * (bw + 1) + c0] +
                             sat[r0 * (bw + 1) + c0];
        const double mean = total / static_cast<double>((r1 - r0) * (c1 - c0));
        best = std::min(best, std::max(0.0, mean - noise_var));
      }
      coeffs(band.row0 + r, band.col0 + c) *= best / (best + noise_var);
    }
  }
}

// Periodic box mean along rows then columns with an odd window.
ImagePlane periodic_box_mean(const ImagePlane& in, int window) {
  const std::size_t h = in.height(), w = in.width();
  const long half = window / 2;
  ImagePlane tmp(h, w), out(h, w);
  std::vector<std::size_t> idx;
  auto build = [&](std::size_t n) {
    idx.resize(n + 2 * half);
    for (long i = -half; i < static_cast<long>(n) + half; ++i) {
      const long m = static_cast<long>(n);
      idx[i + half] = static_cast<std::size_t>(((i % m) + m) % m);
    }
  };
  build(w);
  for (std::size_t r = 0; r < h; ++r) {
    const double* row = in.data() + r * w;
    for (std::size_t c = 0; c < w; ++c) {
      double s = 0.0;
      for (long t = 0; t < window; ++t) s += row[idx[c + t]];
      tmp(r, c) = s;
    }
  }
  build(h);
  const double norm = 1.0 / static_cast<double>(window * window);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) {
      double s = 0.0;
      for (long t = 0; t < window; ++t) s += tmp(idx[r + t], c);
      out(r, c) = s * norm;
    }
  return out;
}

}  // namespace

void DenoiseParams::validate() const {
  require(levels >= 1, "denoise: levels must be at least 1");
  require(std::isfinite(sigma0) && sigma0 > 0.0, "denoise: sigma0 must be positive");
  require(!windows.empty(), "denoise: window list is empty");
  for (int w : windows) require(w >= 3 && w % 2 == 1, "denoise: windows must be odd and at least 3");
}

ResidualPair denoise(const ImagePlane& capture, const DenoiseParams& params) {
  params.validate();
  const std::size_t block = std::size_t{1} << params.levels;
  require(capture.height() >= block && capture.width() >= block,
          "denoise: image too small for the decomposition depth");
  const std::size_t ph = round_up(capture.height(), block), pw = round_up(capture.width(), block);

  ImagePlane coeffs = wavelet::forward(mirror_pad(capture, ph, pw), params.levels);
  const double noise_var = params.sigma0_unit() * params.sigma0_unit();
  for (int level = 1; level <= params.levels; ++level)
    for (const auto& band : wavelet::detail_bands(ph, pw, level)) shrink_band(coeffs, band, noise_var, params.windows);
  ImagePlane smooth = wavelet::inverse(coeffs, params.levels);
  if (ph != capture.height() || pw != capture.width()) smooth = smooth.crop(0, 0, capture.height(), capture.width());

  ImagePlane residual = capture;
  residual -= smooth;
  return {std::move(residual), std::move(smooth), false};
}

ImagePlane rgb_to_gray(const ImagePlane& r, const ImagePlane& g, const ImagePlane& b) {
  require(r.same_shape(g) && r.same_shape(b), "rgb_to_gray: channel dimensions differ");
  ImagePlane out(r.height(), r.width());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  return out;
}

ImagePlane zero_mean(const ImagePlane& residual) {
  ImagePlane out = residual;
  const std::size_t h = out.height(), w = out.width();
  for (std::size_t r = 0; r < h; ++r) {
    auto row = out.row(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(w);
    for (double& v : row) v -= mean;
  }
  std::vector<double> col_mean(w, 0.0);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) col_mean[c] += out(r, c);
  for (double& m : col_mean) m /= static_cast<double>(h);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) out(r, c) -= col_mean[c];
  return out;
}

ImagePlane wiener_dft(const ImagePlane& residual) {
  const std::size_t h = residual.height(), w = residual.width(), n = residual.size();
  if (n == 1) return ImagePlane(h, w);
  spectral::Spectrum spectrum = spectral::forward_full(residual);

  ImagePlane power(h, w);
  for (std::size_t i = 0; i < n; ++i) power[i] = std::norm(spectrum.data()[i]) / static_cast<double>(n);

  std::vector<double> ac(power.values().begin() + 1, power.values().end());
  const auto mid = ac.begin() + static_cast<std::ptrdiff_t>(ac.size() / 2);
  std::nth_element(ac.begin(), mid, ac.end());
  double median = *mid;
  if (ac.size() % 2 == 0) median = 0.5 * (median + *std::max_element(ac.begin(), mid));
  const double noise = median / std::numbers::ln2;

  ImagePlane local(h, w, HUGE_VAL);
  for (int win : {3, 5, 7, 9}) {
    const ImagePlane box = periodic_box_mean(power, win);
    for (std::size_t i = 0; i < n; ++i) local[i] = std::min(local[i], box[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = std::max(noise, local[i]);
    spectrum.data()[i] *= denom > 0.0 ? noise / denom : 0.0;
  }
  spectrum.data()[0] = 0.0;

  double imag_energy = 0.0;
  ImagePlane out = spectral::inverse_full(spectrum, &imag_energy);
  const double real_energy = out.energy();
  if (imag_energy > 1e-9 * real_energy + 1e-300)
    throw std::logic_error("wiener_dft: filtered spectrum lost Hermitian symmetry");
  return out;
}

ResidualPair extract_residual(std::span<const ImagePlane> channels, const DenoiseParams& params, bool clean) {
  require(channels.size() == 1 || channels.size() == 3, "extract_residual: expected 1 or 3 channels");
  ResidualPair pair;
  if (channels.size() == 1) {
    pair = denoise(channels[0], params);
  } else {
    const ResidualPair r = denoise(channels[0], params);
    const ResidualPair g = denoise(channels[1], params);
    const ResidualPair b = denoise(channels[2], params);
    pair.residual = rgb_to_gray(r.residual, g.residual, b.residual);
    pair.denoised = rgb_to_gray(r.denoised, g.denoised, b.denoised);
  }
  if (clean) {
    pair.residual = wiener_dft(zero_mean(pair.residual));
    pair.cleaned = true;
  }
  return pair;
}

}  // namespace prnu
