// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <memory>

#include "prnu/image.hpp"

// Thin RAII layer over FFTW. Buffers come from fftw_malloc so every plan sees
// the same alignment and outputs do not depend on where data happens to live.
namespace prnu::spectral {

namespace detail {
struct FftwDeleter {
  void operator()(void* p) const;
};
void* fftw_alloc_bytes(std::size_t bytes);
}  // namespace detail

/// Complex spectrum of an h x w plane. Full spectra have w columns; half
/// spectra (real-input transforms) keep w/2 + 1 columns.
class Spectrum {
 public:
  Spectrum(std::size_t height, std::size_t width, bool half);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }  // spatial width
  std::size_t columns() const { return half_ ? width_ / 2 + 1 : width_; }
  std::size_t size() const { return height_ * columns(); }
  bool half() const { return half_; }

  std::complex<double>* data() { return data_.get(); }
  const std::complex<double>* data() const { return data_.get(); }
  std::complex<double>& operator()(std::size_t r, std::size_t c) { return data_.get()[r * columns() + c]; }
  const std::complex<double>& operator()(std::size_t r, std::size_t c) const { return data_.get()[r * columns() + c]; }
  double* raw() { return reinterpret_cast<double*>(data_.get()); }
  const double* raw() const { return reinterpret_cast<const double*>(data_.get()); }

 private:
  std::size_t height_;
  std::size_t width_;
  bool half_;
  std::unique_ptr<std::complex<double>, detail::FftwDeleter> data_;
};

/// Full complex DFT of a real plane (unnormalized, FFTW sign convention).
Spectrum forward_full(const ImagePlane& plane);

/// Inverse of forward_full, divided by h*w. The real part is returned and the
/// energy of the discarded imaginary part is written to imag_energy.
ImagePlane inverse_full(const Spectrum& spectrum, double* imag_energy = nullptr);

/// Real-to-half-complex DFT.
Spectrum forward_real(const ImagePlane& plane);

/// Half-complex-to-real inverse, divided by h*w.
ImagePlane inverse_real(const Spectrum& spectrum);

}  // namespace prnu::spectral
