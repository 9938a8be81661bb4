// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/emphasis_curve.hpp"

#include <algorithm>
#include <cmath>

#include "prnu/errors.hpp"

namespace prnu {

std::vector<double> uniform_edges(std::size_t bins) {
  require(bins >= 1, "bins must be at least 1");
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  return edges;
}

std::size_t bin_index(std::span<const double> edges, double x) {
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  const std::ptrdiff_t idx = (it - edges.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(edges.size()) - 2));
}

std::size_t EmphasisCurve::valid_bins() const {
  return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
}

double EmphasisCurve::evaluate(double x) const {
  std::size_t lo = bins(), hi = bins();
  // Nearest valid centers on each side of x.
  for (std::size_t i = 0; i < bins(); ++i) {
    if (!valid(i)) continue;
    if (center(i) <= x) lo = i;
    else if (hi == bins()) hi = i;
  }
  if (lo == bins() && hi == bins()) throw DegenerateError("emphasis curve has no valid bins");
  if (lo == bins()) return values[hi];
  if (hi == bins()) return values[lo];
  const double t = (x - center(lo)) / (center(hi) - center(lo));
  return values[lo] + t * (values[hi] - values[lo]);
}

EmphasisCurve EmphasisCurve::scaled(double c) const {
  EmphasisCurve out = *this;
  for (double& v : out.values) v *= c;
  return out;
}

void EmphasisCurve::validate() const {
  require(edges.size() >= 2, "emphasis curve: need at least one bin");
  require(values.size() + 1 == edges.size() && counts.size() == values.size(),
          "emphasis curve: edges, values and counts disagree in length");
  for (std::size_t i = 1; i < edges.size(); ++i) require(edges[i] > edges[i - 1], "emphasis curve: edges must increase");
  for (double v : values) require(std::isfinite(v), "emphasis curve: non-finite value");
  require(std::isfinite(scale) && scale > 0.0, "emphasis curve: scale must be positive");
}

}  // namespace prnu
