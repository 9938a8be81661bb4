// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "prnu/image.hpp"
#include "prnu/preprocess.hpp"
#include "prnu/weights.hpp"

namespace prnu {

struct FingerprintOptions {
  bool clean = true;                // zero_mean + wiener_dft on the estimate
  double starve_threshold = 1e-12;  // pixels with sum q^2 below this output 0
  // Also starve pixels whose sum q^2 is below this fraction of its plane mean;
  // near-black pixels otherwise turn noise into huge outliers.
  double relative_floor = 1e-3;
};

struct FingerprintEstimate {
  ImagePlane plane;
  WeightScheme scheme = WeightScheme::baseline();
  std::size_t source_count = 0;
  std::size_t starved = 0;
  bool cleaned = false;
};

/// Streaming numerator/denominator of k = sum q(x_l) w_l / sum q(x_l)^2.
class FingerprintAccumulator {
 public:
  FingerprintAccumulator(std::size_t height, std::size_t width, WeightScheme scheme);

  void add(const ResidualPair& pair);
  /// Adds another accumulator's sums (same shape and scheme).
  void merge(const FingerprintAccumulator& other);

  const ImagePlane& numerator() const { return num_; }
  const ImagePlane& denominator() const { return den_; }
  std::size_t count() const { return count_; }
  const WeightScheme& scheme() const { return scheme_; }

  FingerprintEstimate finish(const FingerprintOptions& options = {}) const;

 private:
  WeightScheme scheme_;
  ImagePlane num_;
  ImagePlane den_;
  std::size_t count_ = 0;
};

/// Pairs are summed in canonical (content-digest) order, so the result does
/// not depend on how the caller ordered them.
FingerprintEstimate estimate_fingerprint(std::span<const ResidualPair> pairs, const WeightScheme& scheme,
                                         const FingerprintOptions& options = {});

/// Element-wise num / den with the starvation guard; returns the number of
/// starved pixels.
std::size_t guarded_ratio(const ImagePlane& num, const ImagePlane& den, double threshold, ImagePlane& out);

}  // namespace prnu
