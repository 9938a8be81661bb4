// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/fingerprint.hpp"

#include <algorithm>

#include "prnu/emphasis.hpp"
#include "prnu/errors.hpp"
#include "prnu/simd.hpp"

namespace prnu {

FingerprintAccumulator::FingerprintAccumulator(std::size_t height, std::size_t width, WeightScheme scheme)
    : scheme_(std::move(scheme)), num_(height, width), den_(height, width) {}

void FingerprintAccumulator::add(const ResidualPair& pair) {
  require(pair.residual.same_shape(num_) && pair.denoised.same_shape(num_),
          "fingerprint: residual dimensions differ from the accumulator");
  const ImagePlane q = scheme_.plane(pair.denoised);
  simd::accumulate_weighted(q.data(), pair.residual.data(), num_.data(), den_.data(), q.size());
  ++count_;
}

void FingerprintAccumulator::merge(const FingerprintAccumulator& other) {
  require(other.num_.same_shape(num_), "fingerprint: cannot merge accumulators of different shapes");
  require(other.scheme_.kind() == scheme_.kind(), "fingerprint: cannot merge accumulators of different schemes");
  num_ += other.num_;
  den_ += other.den_;
  count_ += other.count_;
}

std::size_t guarded_ratio(const ImagePlane& num, const ImagePlane& den, double threshold, ImagePlane& out) {
  require(num.same_shape(den), "guarded_ratio: shape mismatch");
  if (!out.same_shape(num)) out = ImagePlane(num.height(), num.width());
  std::size_t starved = 0;
  for (std::size_t i = 0; i < num.size(); ++i) {
    if (den[i] < threshold) {
      out[i] = 0.0;
      ++starved;
    } else {
      out[i] = num[i] / den[i];
    }
  }
  return starved;
}

FingerprintEstimate FingerprintAccumulator::finish(const FingerprintOptions& options) const {
  require(count_ >= 1, "fingerprint: no residuals accumulated");
  FingerprintEstimate est;
  est.scheme = scheme_;
  est.source_count = count_;
  require(options.relative_floor >= 0.0 && options.relative_floor < 1.0, "fingerprint: relative_floor must lie in [0,1)");
  const double mean_den = den_.sum() / static_cast<double>(den_.size());
  est.starved = guarded_ratio(num_, den_, std::max(options.starve_threshold, options.relative_floor * mean_den), est.plane);
  if (options.clean) {
    est.plane = wiener_dft(zero_mean(est.plane));
    est.cleaned = true;
  }
  return est;
}

FingerprintEstimate estimate_fingerprint(std::span<const ResidualPair> pairs, const WeightScheme& scheme,
                                         const FingerprintOptions& options) {
  require(!pairs.empty(), "fingerprint: empty residual list");
  const auto& first = pairs.front().residual;
  FingerprintAccumulator acc(first.height(), first.width(), scheme);
  for (std::size_t idx : canonical_order(pairs)) acc.add(pairs[idx]);
  return acc.finish(options);
}

}  // namespace prnu
