// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/roc.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "prnu/errors.hpp"

namespace prnu {

RocCurve roc_points(std::span<const DetectionScore> h1, std::span<const DetectionScore> h0) {
  require(!h1.empty() && !h0.empty(), "roc_points: both score lists must be nonempty");
  std::vector<double> pos, neg, thresholds;
  for (const auto& s : h1)
    if (s.aligned) pos.push_back(s.pce);
  for (const auto& s : h0) neg.push_back(s.pce);
  thresholds.reserve(h1.size() + h0.size());
  for (const auto& s : h1) thresholds.push_back(s.pce);
  thresholds.insert(thresholds.end(), neg.begin(), neg.end());

  const auto desc = std::greater<double>();
  std::sort(pos.begin(), pos.end(), desc);
  std::sort(neg.begin(), neg.end(), desc);
  std::sort(thresholds.begin(), thresholds.end(), desc);
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  RocCurve curve;
  const double n1 = static_cast<double>(h1.size()), n0 = static_cast<double>(h0.size());
  curve.tpr_ceiling = static_cast<double>(pos.size()) / n1;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t ip = 0, in = 0;
  for (double t : thresholds) {
    while (ip < pos.size() && pos[ip] >= t) ++ip;
    while (in < neg.size() && neg[in] >= t) ++in;
    curve.points.push_back({static_cast<double>(in) / n0, static_cast<double>(ip) / n1, t});
  }
  return curve;
}

double tpr_at_fpr(const RocCurve& curve, double fpr) {
  require(fpr >= 0.0 && fpr <= 1.0, "tpr_at_fpr: target must lie in [0,1]");
  double best = 0.0;
  for (const auto& p : curve.points)
    if (p.fpr <= fpr) best = std::max(best, p.tpr);
  return best;
}

}  // namespace prnu
