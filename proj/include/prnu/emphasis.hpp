// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "prnu/emphasis_curve.hpp"
#include "prnu/image.hpp"
#include "prnu/preprocess.hpp"
#include "prnu/weights.hpp"

namespace prnu {

constexpr std::size_t kDefaultBins = 32;

/// B x B regressogram of the residual cross-covariance over pairs of
/// brightness values. Cells without samples are invalid and hold NaN.
struct PhiMatrix {
  std::vector<double> edges;
  std::vector<double> values;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint8_t> mask;  // 1 = valid
  std::vector<std::uint64_t> marginal_counts;  // per-bin (image, pixel) samples

  std::size_t bins() const { return edges.size() - 1; }
  std::size_t index(std::size_t p, std::size_t q) const { return p * bins() + q; }
  bool valid(std::size_t p, std::size_t q) const { return mask[index(p, q)] != 0; }
  double value(std::size_t p, std::size_t q) const { return values[index(p, q)]; }
};

/// Indices of `pairs` sorted by content digest (ties by position). All
/// estimators iterate in this order, which makes their output independent of
/// the caller's ordering, bit for bit.
std::vector<std::size_t> canonical_order(std::span<const ResidualPair> pairs);

/// Accumulates w_i * w_j over every ordered pair i != j and pixel n into the
/// cell of (x_i[n], x_j[n]); the cell value is the sample mean.
PhiMatrix regressogram_2d(std::span<const ResidualPair> pairs, std::size_t bins = kDefaultBins);

/// (Phi + Phi^T) / 2 where both cells are valid, the valid one where only one is.
PhiMatrix symmetrize(const PhiMatrix& phi);

/// Dense copy of a symmetric PhiMatrix with invalid cells imputed from the
/// nearest valid cell along the row and along the column (averaged).
Eigen::MatrixXd complete_matrix(const PhiMatrix& phi);

/// Leading eigenpair of the completed matrix: values = sqrt(lambda_1) * v with
/// the sign of v chosen so its entries sum to a nonnegative number. Throws
/// DegenerateError when lambda_1 <= 0 or is not separated from the next
/// eigenvalue magnitude by a relative gap of 1e-9.
EmphasisCurve rank1_emphasis(const PhiMatrix& phi_s);

/// Bins the products w_l * kref by x_l with a single shared reference.
EmphasisCurve regressogram_1d(std::span<const ResidualPair> pairs, const ImagePlane& kref,
                              std::size_t bins = kDefaultBins);

/// Leave-one-out variant: the product for residual l uses the fingerprint
/// estimate (weighted by `weight`) built from every other residual.
EmphasisCurve regressogram_1d_loo(std::span<const ResidualPair> pairs, const WeightScheme& weight,
                                  std::size_t bins = kDefaultBins);

enum class KrefMode { leave_one_out, shared };

/// Simplified regressogram refined `iterations` times: the first pass uses
/// the baseline estimator as reference, each later pass re-weights the
/// reference with the previous curve.
EmphasisCurve iterate_emphasis(std::span<const ResidualPair> pairs, int iterations, std::size_t bins = kDefaultBins,
                               KrefMode mode = KrefMode::leave_one_out);

}  // namespace prnu
