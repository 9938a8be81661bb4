// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "prnu/fingerprint.hpp"
#include "prnu/image.hpp"
#include "prnu/spectral.hpp"

namespace prnu {

constexpr int kDefaultPceNeighborhood = 11;

/// Normalized cross-correlation over shifts. rho(s) = sum_n r[n] t[n + s] /
/// (|r| |t|), so a residual cropped from the term at origin s peaks at s.
struct CorrelationPlane {
  ImagePlane plane;
  Shift peak;          // argmax, ties to the smallest row then column
  bool cyclic = true;  // false once restricted to non-wrapping shifts
};

/// First maximum in row-major order.
Shift argmax(const ImagePlane& plane);

/// Correlation of `residual` (zero-padded) against every cyclic placement
/// over `term`. Both should be zero-mean; zero-energy inputs are rejected.
CorrelationPlane ncc_surface(const ImagePlane& term, const ImagePlane& residual);

/// Caches the spectrum of a large fingerprint plane so many probes can be
/// correlated against it.
class FingerprintSpectrum {
 public:
  explicit FingerprintSpectrum(const ImagePlane& term);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }

  /// Full cyclic correlation surface of a probe no larger than the term.
  CorrelationPlane correlate(const ImagePlane& probe) const;

 private:
  std::size_t height_;
  std::size_t width_;
  double norm_;
  spectral::Spectrum spectrum_;
};

struct PceResult {
  double value = 0.0;  // +inf when saturated
  double peak = 0.0;   // rho at the evaluated shift
  int sign = 1;        // sign of rho at the evaluated shift
  bool saturated = false;
  Shift shift;
};

/// Peak-to-correlation energy: rho(s0)^2 (|A| - |N|) / sum_{s outside N} rho(s)^2
/// with N the neighborhood x neighborhood block around s0 (wrapping on cyclic
/// planes, clipped otherwise). s0 defaults to the plane's peak.
PceResult pce(const CorrelationPlane& surface, std::optional<Shift> at = std::nullopt,
              int neighborhood = kDefaultPceNeighborhood);

enum class Hypothesis { H0, H1 };

struct DetectionScore {
  double pce = 0.0;
  Shift shift;
  bool aligned = false;
  Hypothesis label = Hypothesis::H0;
  bool saturated = false;
};

/// Searches every non-wrapping placement of the weighted residual patch
/// inside the fingerprint square. With `true_shift` (H1 protocol) the sample
/// keeps label H1 only if the argmax hits the true crop; without it (H0
/// protocol) the PCE at the argmax, i.e. the maximum over alignments, is
/// reported with label H0. A patch as large as the fingerprint is scored on
/// the full cyclic surface instead.
DetectionScore align_and_score(const FingerprintSpectrum& fingerprint, const ImagePlane& weights,
                               const ImagePlane& residual_patch, std::optional<Shift> true_shift = std::nullopt,
                               int neighborhood = kDefaultPceNeighborhood);

DetectionScore align_and_score(const FingerprintEstimate& fingerprint, const ImagePlane& weights,
                               const ImagePlane& residual_patch, std::optional<Shift> true_shift = std::nullopt,
                               int neighborhood = kDefaultPceNeighborhood);

}  // namespace prnu
