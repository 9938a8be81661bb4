// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>
#include <new>
#include <tuple>

#include "prnu/errors.hpp"

namespace prnu::spectral {

namespace detail {

void FftwDeleter::operator()(void* p) const { fftw_free(p); }

void* fftw_alloc_bytes(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 16 : bytes);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

}  // namespace detail

namespace {

enum class PlanKind { forward_c2c, inverse_c2c, forward_r2c, inverse_c2r };

using PlanKey = std::tuple<PlanKind, std::size_t, std::size_t>;

struct RealBuffer {
  explicit RealBuffer(std::size_t n)
      : ptr(static_cast<double*>(detail::fftw_alloc_bytes(n * sizeof(double)))) {}
  std::unique_ptr<double, detail::FftwDeleter> ptr;
  double* get() { return ptr.get(); }
};

// FFTW's planner is not thread-safe; execution of an existing plan on new
// arrays is. Plans live for the process lifetime.
fftw_plan get_plan(PlanKind kind, std::size_t h, std::size_t w) {
  static std::mutex mutex;
  static std::map<PlanKey, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const PlanKey key{kind, h, w};
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const int ih = static_cast<int>(h), iw = static_cast<int>(w);
  const std::size_t full = h * w, half = h * (w / 2 + 1);
  RealBuffer real(std::max(full, 2 * half));
  auto* cplx_a = static_cast<fftw_complex*>(detail::fftw_alloc_bytes(full * sizeof(fftw_complex)));
  auto* cplx_b = static_cast<fftw_complex*>(detail::fftw_alloc_bytes(full * sizeof(fftw_complex)));
  fftw_plan plan = nullptr;
  switch (kind) {
    case PlanKind::forward_c2c:
      plan = fftw_plan_dft_2d(ih, iw, cplx_a, cplx_b, FFTW_FORWARD, FFTW_ESTIMATE);
      break;
    case PlanKind::inverse_c2c:
      plan = fftw_plan_dft_2d(ih, iw, cplx_a, cplx_b, FFTW_BACKWARD, FFTW_ESTIMATE);
      break;
    case PlanKind::forward_r2c:
      plan = fftw_plan_dft_r2c_2d(ih, iw, real.get(), cplx_a, FFTW_ESTIMATE);
      break;
    case PlanKind::inverse_c2r:
      plan = fftw_plan_dft_c2r_2d(ih, iw, cplx_a, real.get(), FFTW_ESTIMATE);
      break;
  }
  fftw_free(cplx_a);
  fftw_free(cplx_b);
  if (plan == nullptr) throw std::runtime_error("FFTW could not create a plan");
  cache.emplace(key, plan);
  return plan;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Spectrum::Spectrum(std::size_t height, std::size_t width, bool half)
    : height_(height),
      width_(width),
      half_(half),
      data_(static_cast<std::complex<double>*>(
          detail::fftw_alloc_bytes(height * (half ? width / 2 + 1 : width) * sizeof(std::complex<double>)))) {
  require(height >= 1 && width >= 1, "Spectrum: zero dimensions");
  std::memset(static_cast<void*>(data_.get()), 0, size() * sizeof(std::complex<double>));
}

Spectrum forward_full(const ImagePlane& plane) {
  Spectrum in(plane.height(), plane.width(), false);
  for (std::size_t i = 0; i < plane.size(); ++i) in.data()[i] = {plane[i], 0.0};
  Spectrum out(plane.height(), plane.width(), false);
  fftw_execute_dft(get_plan(PlanKind::forward_c2c, plane.height(), plane.width()), as_fftw(in.data()),
                   as_fftw(out.data()));
  return out;
}

ImagePlane inverse_full(const Spectrum& spectrum, double* imag_energy) {
  require(!spectrum.half(), "inverse_full: expected a full spectrum");
  Spectrum in(spectrum.height(), spectrum.width(), false);
  std::copy(spectrum.data(), spectrum.data() + spectrum.size(), in.data());
  Spectrum out(spectrum.height(), spectrum.width(), false);
  fftw_execute_dft(get_plan(PlanKind::inverse_c2c, spectrum.height(), spectrum.width()), as_fftw(in.data()),
                   as_fftw(out.data()));
  const double norm = 1.0 / static_cast<double>(spectrum.height() * spectrum.width());
  ImagePlane plane(spectrum.height(), spectrum.width());
  double im = 0.0;
  for (std::size_t i = 0; i < plane.size(); ++i) {
    plane[i] = out.data()[i].real() * norm;
    const double v = out.data()[i].imag() * norm;
    im += v * v;
  }
  if (imag_energy != nullptr) *imag_energy = im;
  return plane;
}

Spectrum forward_real(const ImagePlane& plane) {
  RealBuffer in(plane.size());
  std::copy(plane.data(), plane.data() + plane.size(), in.get());
  Spectrum out(plane.height(), plane.width(), true);
  fftw_execute_dft_r2c(get_plan(PlanKind::forward_r2c, plane.height(), plane.width()), in.get(),
                       as_fftw(out.data()));
  return out;
}

ImagePlane inverse_real(const Spectrum& spectrum) {
  require(spectrum.half(), "inverse_real: expected a half spectrum");
  // c2r overwrites its input.
  Spectrum scratch(spectrum.height(), spectrum.width(), true);
  std::copy(spectrum.data(), spectrum.data() + spectrum.size(), scratch.data());
  RealBuffer out(spectrum.height() * spectrum.width());
  fftw_execute_dft_c2r(get_plan(PlanKind::inverse_c2r, spectrum.height(), spectrum.width()), as_fftw(scratch.data()),
                       out.get());
  const double norm = 1.0 / static_cast<double>(spectrum.height() * spectrum.width());
  ImagePlane plane(spectrum.height(), spectrum.width());
  for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = out.get()[i] * norm;
  return plane;
}

}  // namespace prnu::spectral
