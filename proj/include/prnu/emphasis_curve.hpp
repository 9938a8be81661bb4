// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace prnu {

/// `bins` uniform bins on [0,1]: bins + 1 edges, edges[0] = 0, edges[bins] = 1.
std::vector<double> uniform_edges(std::size_t bins);

/// Bin holding x under half-open [e_p, e_{p+1}) intervals; the last bin is
/// closed and values outside [0,1] are clamped into the end bins.
std::size_t bin_index(std::span<const double> edges, double x);

/// Binned estimate of the emphasis function over brightness.
struct EmphasisCurve {
  std::vector<double> edges;
  std::vector<double> values;
  std::vector<std::uint64_t> counts;
  double scale = 1.0;  // normalization constant from transfer recovery

  std::size_t bins() const { return values.size(); }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  bool valid(std::size_t i) const { return counts[i] > 0; }
  std::size_t valid_bins() const;

  /// Piecewise-linear interpolation through the centers of valid bins,
  /// constant beyond the first and last valid centers.
  double evaluate(double x) const;

  /// Copy with every value multiplied by c.
  EmphasisCurve scaled(double c) const;

  void validate() const;
};

}  // namespace prnu
