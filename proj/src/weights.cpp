// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/weights.hpp"

#include <algorithm>
#include <cmath>

#include "prnu/errors.hpp"

namespace prnu {

WeightScheme WeightScheme::baseline() { return WeightScheme(Kind::baseline, nullptr); }

WeightScheme WeightScheme::emphasis(EmphasisCurve curve) {
  curve.validate();
  require(curve.valid_bins() >= 1, "emphasis weighting needs at least one valid bin");
  return WeightScheme(Kind::emphasis, std::make_shared<const EmphasisCurve>(std::move(curve)));
}

WeightScheme WeightScheme::fixed_parabola() { return WeightScheme(Kind::fixed_parabola, nullptr); }

std::string WeightScheme::name() const {
  switch (kind_) {
    case Kind::baseline:
      return "baseline";
    case Kind::emphasis:
      return "emphasis";
    case Kind::fixed_parabola:
      return "fixed";
  }
  return "?";
}

WeightScheme WeightScheme::with_gain(double c) const {
  require(std::isfinite(c) && c > 0.0, "weight gain must be positive");
  WeightScheme out = *this;
  out.gain_ = gain_ * c;
  return out;
}

double WeightScheme::operator()(double x) const {
  require(x >= 0.0 && x <= 1.0, "weight evaluated outside [0,1]");
  double q = 0.0;
  switch (kind_) {
    case Kind::baseline:
      q = x;
      break;
    case Kind::emphasis:
      q = curve_->evaluate(x);
      break;
    case Kind::fixed_parabola:
      q = 4.0 * x * (1.0 - x);
      break;
  }
  return gain_ * q;
}

ImagePlane WeightScheme::plane(const ImagePlane& denoised) const {
  ImagePlane out(denoised.height(), denoised.width());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(std::clamp(denoised[i], 0.0, 1.0));
  return out;
}

double weight_eval(const WeightScheme& scheme, double x) { return scheme(x); }

}  // namespace prnu
