// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "prnu/emphasis_curve.hpp"
#include "prnu/image.hpp"

namespace prnu {

/// Brightness weighting q(x) used by the fingerprint estimator and by the
/// matched filter in detection.
class WeightScheme {
 public:
  enum class Kind { baseline, emphasis, fixed_parabola };

  /// q(x) = x (the multiplicative model).
  static WeightScheme baseline();
  /// q(x) = curve.evaluate(x).
  static WeightScheme emphasis(EmphasisCurve curve);
  /// q(x) = 4 x (1 - x), the inverse parabola -v^2 + 255 v rescaled to peak 1.
  static WeightScheme fixed_parabola();

  Kind kind() const { return kind_; }
  std::string name() const;
  const EmphasisCurve* curve() const { return curve_.get(); }

  /// Multiplies every weight by c > 0 (e.g. 255^2/4 reproduces the 0-255
  /// parabola exactly).
  WeightScheme with_gain(double c) const;
  double gain() const { return gain_; }

  /// q(x) for x in [0,1].
  double operator()(double x) const;

  /// q applied pixel-wise to a denoised plane; samples are clamped to [0,1]
  /// first, since noisy denoised values can leave the unit interval.
  ImagePlane plane(const ImagePlane& denoised) const;

 private:
  WeightScheme(Kind kind, std::shared_ptr<const EmphasisCurve> curve) : kind_(kind), curve_(std::move(curve)) {}

  Kind kind_ = Kind::baseline;
  std::shared_ptr<const EmphasisCurve> curve_;
  double gain_ = 1.0;
};

double weight_eval(const WeightScheme& scheme, double x);

}  // namespace prnu
