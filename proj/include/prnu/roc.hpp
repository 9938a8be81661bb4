// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "prnu/detection.hpp"

namespace prnu {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // decide H1 when pce >= threshold
};

/// Modified ROC: an H1 sample is a detection only if it was aligned, so no
/// point rises above tpr_ceiling.
struct RocCurve {
  std::vector<RocPoint> points;  // fpr and tpr nondecreasing
  double tpr_ceiling = 0.0;      // fraction of aligned H1 samples
};

/// Sweeps the threshold over every observed PCE value, starting from the
/// (0,0) point above all scores.
RocCurve roc_points(std::span<const DetectionScore> h1, std::span<const DetectionScore> h0);

/// Largest tpr among points with fpr <= target.
double tpr_at_fpr(const RocCurve& curve, double fpr);

}  // namespace prnu
