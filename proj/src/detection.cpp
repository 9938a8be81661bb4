// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/detection.hpp"

#include <cmath>
#include <limits>

#include "prnu/errors.hpp"
#include "prnu/simd.hpp"

namespace prnu {

namespace {

ImagePlane pad_to(const ImagePlane& probe, std::size_t h, std::size_t w) {
  if (probe.height() == h && probe.width() == w) return probe;
  ImagePlane out(h, w);
  for (std::size_t r = 0; r < probe.height(); ++r) {
    const auto src = probe.row(r);
    std::copy(src.begin(), src.end(), out.data() + r * w);
  }
  return out;
}

// Distance between a and b on a ring of size n (cyclic) or the line.
std::size_t axis_distance(long a, long b, long n, bool cyclic) {
  const long d = std::labs(a - b);
  return static_cast<std::size_t>(cyclic ? std::min(d, n - d) : d);
}

}  // namespace

Shift argmax(const ImagePlane& plane) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < plane.size(); ++i)
    if (plane[i] > plane[best]) best = i;
  return {static_cast<long>(best / plane.width()), static_cast<long>(best % plane.width())};
}

FingerprintSpectrum::FingerprintSpectrum(const ImagePlane& term)
    : height_(term.height()), width_(term.width()), norm_(std::sqrt(term.energy())), spectrum_(spectral::forward_real(term)) {
  require(norm_ > 0.0, "correlation: fingerprint term has zero energy");
}

CorrelationPlane FingerprintSpectrum::correlate(const ImagePlane& probe) const {
  require(probe.height() <= height_ && probe.width() <= width_,
          "correlation: residual is larger than the fingerprint plane");
  const double probe_norm = std::sqrt(probe.energy());
  require(probe_norm > 0.0, "correlation: residual has zero energy");
  const spectral::Spectrum p = spectral::forward_real(pad_to(probe, height_, width_));
  spectral::Spectrum cross(height_, width_, true);
  simd::cross_spectrum(p.raw(), spectrum_.raw(), cross.raw(), cross.size());
  CorrelationPlane out{spectral::inverse_real(cross), {}, true};
  simd::scale(out.plane.data(), 1.0 / (probe_norm * norm_), out.plane.size());
  out.peak = argmax(out.plane);
  return out;
}

CorrelationPlane ncc_surface(const ImagePlane& term, const ImagePlane& residual) {
  return FingerprintSpectrum(term).correlate(residual);
}

PceResult pce(const CorrelationPlane& surface, std::optional<Shift> at, int neighborhood) {
  const ImagePlane& rho = surface.plane;
  require(neighborhood >= 1 && neighborhood % 2 == 1, "pce: neighborhood must be odd and positive");
  require(static_cast<std::size_t>(neighborhood) * static_cast<std::size_t>(neighborhood) < rho.size(),
          "pce: neighborhood must be smaller than the correlation plane");
  const Shift s0 = at.value_or(surface.peak);
  require(s0.row >= 0 && s0.col >= 0 && static_cast<std::size_t>(s0.row) < rho.height() &&
              static_cast<std::size_t>(s0.col) < rho.width(),
          "pce: shift outside the correlation plane");

  const std::size_t radius = static_cast<std::size_t>(neighborhood / 2);
  const long h = static_cast<long>(rho.height()), w = static_cast<long>(rho.width());
  double outside = 0.0;
  std::size_t outside_count = 0;
  for (long r = 0; r < h; ++r) {
    const bool row_in = axis_distance(r, s0.row, h, surface.cyclic) <= radius;
    for (long c = 0; c < w; ++c) {
      if (row_in && axis_distance(c, s0.col, w, surface.cyclic) <= radius) continue;
      const double v = rho(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      outside += v * v;
      ++outside_count;
    }
  }

  PceResult res;
  res.shift = s0;
  res.peak = rho(static_cast<std::size_t>(s0.row), static_cast<std::size_t>(s0.col));
  res.sign = res.peak < 0.0 ? -1 : 1;
  if (outside_count == 0 || outside <= 0.0) {
    res.saturated = true;
    res.value = std::numeric_limits<double>::infinity();
    return res;
  }
  res.value = res.peak * res.peak * static_cast<double>(outside_count) / outside;
  return res;
}

DetectionScore align_and_score(const FingerprintSpectrum& fingerprint, const ImagePlane& weights,
                               const ImagePlane& residual_patch, std::optional<Shift> true_shift, int neighborhood) {
  require(weights.same_shape(residual_patch), "align_and_score: weight plane and patch differ in size");
  require(residual_patch.height() <= fingerprint.height() && residual_patch.width() <= fingerprint.width(),
          "align_and_score: patch does not fit inside the fingerprint square");
  ImagePlane probe = hadamard(weights, residual_patch);
  probe += -probe.sum() / static_cast<double>(probe.size());

  const CorrelationPlane full = fingerprint.correlate(probe);
  const bool same_size = residual_patch.height() == fingerprint.height() && residual_patch.width() == fingerprint.width();
  // A full-size patch has a single placement; score it on the cyclic surface.
  const std::size_t vh = same_size ? fingerprint.height() : fingerprint.height() - residual_patch.height() + 1;
  const std::size_t vw = same_size ? fingerprint.width() : fingerprint.width() - residual_patch.width() + 1;
  CorrelationPlane valid = same_size ? full : CorrelationPlane{full.plane.crop(0, 0, vh, vw), {}, false};
  valid.peak = argmax(valid.plane);

  const PceResult p = pce(valid, valid.peak, neighborhood);
  DetectionScore score;
  score.shift = valid.peak;
  score.saturated = p.saturated;
  score.pce = p.saturated ? std::numeric_limits<double>::max() : p.value;
  if (true_shift.has_value()) {
    require(true_shift->row >= 0 && true_shift->col >= 0 && static_cast<std::size_t>(true_shift->row) < vh &&
                static_cast<std::size_t>(true_shift->col) < vw,
            "align_and_score: true shift outside the search range");
    score.aligned = valid.peak == *true_shift;
    score.label = score.aligned ? Hypothesis::H1 : Hypothesis::H0;
  } else {
    score.aligned = false;
    score.label = Hypothesis::H0;
  }
  return score;
}

DetectionScore align_and_score(const FingerprintEstimate& fingerprint, const ImagePlane& weights,
                               const ImagePlane& residual_patch, std::optional<Shift> true_shift, int neighborhood) {
  return align_and_score(FingerprintSpectrum(fingerprint.plane), weights, residual_patch, true_shift, neighborhood);
}

}  // namespace prnu
