// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "prnu/emphasis_curve.hpp"

namespace prnu {

constexpr double kDefaultEpsilon = 1.0 / 255.0;
constexpr std::size_t kDefaultGridSize = 1024;

/// Sampled transfer curve on a uniform grid over [epsilon, 1].
struct TransferCurve {
  std::vector<double> grid;
  std::vector<double> values;
  double a = 1.0;  // normalization constant (1 - epsilon) / G(1)
  double epsilon = kDefaultEpsilon;

  /// Linear interpolation on the grid; u is clamped to [epsilon, 1].
  double operator()(double u) const;
};

/// Solves u h'(u) = a g(u) with h(epsilon) = epsilon and h(1) = 1:
/// h(u) = epsilon + a G(u), G(u) = integral_epsilon^u g(t)/t dt.
/// The emphasis is taken piecewise-linear between the centers of valid bins
/// (constant beyond the end centers) and G is integrated exactly on every
/// linear piece. Throws InvalidArgument if G(1) <= 0 and DegenerateError if
/// the result decreases by more than 1e-6 anywhere.
TransferCurve recover_transfer(const EmphasisCurve& curve, double epsilon = kDefaultEpsilon,
                               std::size_t grid_size = kDefaultGridSize);

/// As above and additionally stores the normalization constant in curve.scale.
TransferCurve recover_transfer_and_scale(EmphasisCurve& curve, double epsilon = kDefaultEpsilon,
                                         std::size_t grid_size = kDefaultGridSize);

/// Same integration for an analytic emphasis, linearly interpolated between
/// the grid samples.
TransferCurve recover_transfer(const std::function<double(double)>& emphasis, double epsilon = kDefaultEpsilon,
                               std::size_t grid_size = kDefaultGridSize);

/// Count-weighted R^2 of a through-origin line fit to the valid bins:
/// (sum w c v)^2 / (sum w c^2 * sum w v^2), or 0 when the fitted slope is not
/// positive. Values near 1 mean the emphasis is proportional to brightness,
/// i.e. the transfer curve behaves like a gamma correction.
double gamma_linearity_score(const EmphasisCurve& curve);

}  // namespace prnu
