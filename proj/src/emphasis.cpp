// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/emphasis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "prnu/errors.hpp"
#include "prnu/fingerprint.hpp"

namespace prnu {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_pairs(std::span<const ResidualPair> pairs, std::size_t minimum, const char* who) {
  require(pairs.size() >= minimum, std::string(who) + ": needs at least " + std::to_string(minimum) + " residuals");
  const ImagePlane& ref = pairs.front().residual;
  for (const auto& p : pairs)
    require(p.residual.same_shape(ref) && p.denoised.same_shape(ref), std::string(who) + ": dimension mismatch");
}

std::vector<std::uint32_t> bin_plane(const ImagePlane& x, std::span<const double> edges) {
  std::vector<std::uint32_t> out(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    require(std::isfinite(x[n]), "regressogram: non-finite covariate");
    out[n] = static_cast<std::uint32_t>(bin_index(edges, x[n]));
  }
  return out;
}

void check_not_degenerate(const EmphasisCurve& curve, int iteration) {
  for (std::size_t i = 0; i < curve.bins(); ++i)
    if (curve.valid(i) && curve.values[i] != 0.0) return;
  throw DegenerateError("iterate_emphasis: curve vanished at iteration " + std::to_string(iteration));
}

// Nearest valid entries along one line; equidistant candidates are averaged.
bool nearest_on_line(const PhiMatrix& phi, std::size_t fixed, std::size_t pos, bool along_row, double& out) {
  const std::size_t b = phi.bins();
  for (std::size_t d = 1; d < b; ++d) {
    double sum = 0.0;
    int found = 0;
    for (int side : {-1, 1}) {
      const long k = static_cast<long>(pos) + side * static_cast<long>(d);
      if (k < 0 || k >= static_cast<long>(b)) continue;
      const std::size_t p = along_row ? fixed : static_cast<std::size_t>(k);
      const std::size_t q = along_row ? static_cast<std::size_t>(k) : fixed;
      if (phi.valid(p, q)) {
        sum += phi.value(p, q);
        ++found;
      }
    }
    if (found > 0) {
      out = sum / found;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<std::size_t> canonical_order(std::span<const ResidualPair> pairs) {
  std::vector<std::uint64_t> keys(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    keys[i] = plane_digest(pairs[i].denoised, plane_digest(pairs[i].residual));
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  return order;
}

PhiMatrix regressogram_2d(std::span<const ResidualPair> pairs, std::size_t bins) {
  check_pairs(pairs, 2, "regressogram_2d");
  PhiMatrix phi;
  phi.edges = uniform_edges(bins);
  const std::size_t cells = bins * bins;
  std::vector<double> sums(cells, 0.0);
  phi.counts.assign(cells, 0);
  phi.marginal_counts.assign(bins, 0);

  const auto order = canonical_order(pairs);
  std::vector<std::vector<std::uint32_t>> idx(pairs.size());
  for (std::size_t l = 0; l < pairs.size(); ++l) {
    idx[l] = bin_plane(pairs[order[l]].denoised, phi.edges);
    for (auto b : idx[l]) ++phi.marginal_counts[b];
  }

  const std::size_t n_pix = pairs.front().residual.size();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double* wi = pairs[order[i]].residual.data();
    const std::uint32_t* bi = idx[i].data();
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      if (j == i) continue;
      const double* wj = pairs[order[j]].residual.data();
      const std::uint32_t* bj = idx[j].data();
      for (std::size_t n = 0; n < n_pix; ++n) {
        const std::size_t cell = bi[n] * bins + bj[n];
        sums[cell] += wi[n] * wj[n];
        ++phi.counts[cell];
      }
    }
  }

  phi.values.assign(cells, kNaN);
  phi.mask.assign(cells, 0);
  for (std::size_t c = 0; c < cells; ++c) {
    if (phi.counts[c] == 0) continue;
    phi.values[c] = sums[c] / static_cast<double>(phi.counts[c]);
    phi.mask[c] = 1;
  }
  return phi;
}

PhiMatrix symmetrize(const PhiMatrix& phi) {
  PhiMatrix out = phi;
  const std::size_t b = phi.bins();
  for (std::size_t p = 0; p < b; ++p) {
    for (std::size_t q = 0; q < b; ++q) {
      const std::size_t pq = phi.index(p, q), qp = phi.index(q, p);
      const bool a = phi.mask[pq] != 0, t = phi.mask[qp] != 0;
      out.counts[pq] = p == q ? phi.counts[pq] : phi.counts[pq] + phi.counts[qp];
      if (a && t) {
        out.values[pq] = 0.5 * (phi.values[pq] + phi.values[qp]);
        out.mask[pq] = 1;
      } else if (a || t) {
        out.values[pq] = a ? phi.values[pq] : phi.values[qp];
        out.mask[pq] = 1;
      } else {
        out.values[pq] = kNaN;
        out.mask[pq] = 0;
      }
    }
  }
  return out;
}

Eigen::MatrixXd complete_matrix(const PhiMatrix& phi) {
  const std::size_t b = phi.bins();
  double total = 0.0;
  std::size_t valid = 0;
  for (std::size_t c = 0; c < b * b; ++c)
    if (phi.mask[c]) {
      total += phi.values[c];
      ++valid;
    }
  if (valid == 0) throw DegenerateError("regressogram matrix has no valid cells");

  Eigen::MatrixXd m(b, b);
  for (std::size_t p = 0; p < b; ++p) {
    for (std::size_t q = 0; q < b; ++q) {
      if (phi.valid(p, q)) {
        m(p, q) = phi.value(p, q);
        continue;
      }
      double along_row = 0.0, along_col = 0.0;
      const bool has_row = nearest_on_line(phi, p, q, true, along_row);
      const bool has_col = nearest_on_line(phi, q, p, false, along_col);
      if (has_row && has_col) m(p, q) = 0.5 * (along_row + along_col);
      else if (has_row) m(p, q) = along_row;
      else if (has_col) m(p, q) = along_col;
      else m(p, q) = total / static_cast<double>(valid);
    }
  }
  return m;
}

EmphasisCurve rank1_emphasis(const PhiMatrix& phi_s) {
  const std::size_t b = phi_s.bins();
  require(phi_s.values.size() == b * b && phi_s.mask.size() == b * b, "rank1_emphasis: malformed matrix");
  double magnitude = 0.0;
  for (std::size_t c = 0; c < b * b; ++c)
    if (phi_s.mask[c]) magnitude = std::max(magnitude, std::abs(phi_s.values[c]));
  for (std::size_t p = 0; p < b; ++p)
    for (std::size_t q = p + 1; q < b; ++q) {
      require(phi_s.valid(p, q) == phi_s.valid(q, p), "rank1_emphasis: mask is not symmetric");
      if (phi_s.valid(p, q))
        require(std::abs(phi_s.value(p, q) - phi_s.value(q, p)) <= 1e-12 * magnitude,
                "rank1_emphasis: matrix is not symmetric (symmetrize first)");
    }

  const Eigen::MatrixXd m = complete_matrix(phi_s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw DegenerateError("rank1_emphasis: eigendecomposition failed");
  const Eigen::VectorXd& lambda = solver.eigenvalues();

  std::vector<Eigen::Index> order(b);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index c) { return std::abs(lambda(a)) > std::abs(lambda(c)); });
  const double top = lambda(order[0]);
  if (!(top > 0.0)) throw DegenerateError("rank1_emphasis: leading eigenvalue is not positive");
  if (b > 1 && (std::abs(top) - std::abs(lambda(order[1]))) < 1e-9 * std::abs(top))
    throw DegenerateError("rank1_emphasis: leading eigenvalue is not separated from the next");

  Eigen::VectorXd v = solver.eigenvectors().col(order[0]);
  if (v.sum() < 0.0) v = -v;

  EmphasisCurve curve;
  curve.edges = phi_s.edges;
  curve.values.resize(b);
  const double root = std::sqrt(top);
  for (std::size_t i = 0; i < b; ++i) curve.values[i] = root * v(static_cast<Eigen::Index>(i));
  curve.counts = phi_s.marginal_counts.empty() ? std::vector<std::uint64_t>(b, 1) : phi_s.marginal_counts;
  return curve;
}

namespace {

struct BinSums {
  std::vector<double> sums;
  std::vector<std::uint64_t> counts;
};

void bin_products(const ResidualPair& pair, const ImagePlane& kref, std::span<const double> edges, BinSums& acc) {
  const ImagePlane& w = pair.residual;
  const ImagePlane& x = pair.denoised;
  for (std::size_t n = 0; n < w.size(); ++n) {
    require(std::isfinite(x[n]), "regressogram: non-finite covariate");
    const std::size_t b = bin_index(edges, x[n]);
    acc.sums[b] += w[n] * kref[n];
    ++acc.counts[b];
  }
}

EmphasisCurve finish_curve(std::vector<double> edges, const BinSums& acc) {
  EmphasisCurve curve;
  const std::size_t b = edges.size() - 1;
  curve.edges = std::move(edges);
  curve.values.assign(b, 0.0);
  curve.counts = acc.counts;
  for (std::size_t i = 0; i < b; ++i)
    if (acc.counts[i] > 0) curve.values[i] = acc.sums[i] / static_cast<double>(acc.counts[i]);
  return curve;
}

}  // namespace

EmphasisCurve regressogram_1d(std::span<const ResidualPair> pairs, const ImagePlane& kref, std::size_t bins) {
  check_pairs(pairs, 1, "regressogram_1d");
  require(kref.same_shape(pairs.front().residual), "regressogram_1d: reference fingerprint dimensions differ");
  auto edges = uniform_edges(bins);
  BinSums acc{std::vector<double>(bins, 0.0), std::vector<std::uint64_t>(bins, 0)};
  for (std::size_t idx : canonical_order(pairs)) bin_products(pairs[idx], kref, edges, acc);
  return finish_curve(std::move(edges), acc);
}

EmphasisCurve regressogram_1d_loo(std::span<const ResidualPair> pairs, const WeightScheme& weight, std::size_t bins) {
  check_pairs(pairs, 2, "regressogram_1d_loo");
  const auto order = canonical_order(pairs);
  const ImagePlane& ref = pairs.front().residual;
  FingerprintAccumulator total(ref.height(), ref.width(), weight);
  for (std::size_t idx : order) total.add(pairs[idx]);

  auto edges = uniform_edges(bins);
  BinSums acc{std::vector<double>(bins, 0.0), std::vector<std::uint64_t>(bins, 0)};
  ImagePlane num(ref.height(), ref.width()), den(ref.height(), ref.width()), kref;
  const FingerprintOptions guard{};
  for (std::size_t idx : order) {
    const ResidualPair& pair = pairs[idx];
    const ImagePlane q = weight.plane(pair.denoised);
    for (std::size_t n = 0; n < q.size(); ++n) {
      num[n] = total.numerator()[n] - q[n] * pair.residual[n];
      den[n] = total.denominator()[n] - q[n] * q[n];
    }
    guarded_ratio(num, den, guard.starve_threshold, kref);
    bin_products(pair, kref, edges, acc);
  }
  return finish_curve(std::move(edges), acc);
}

EmphasisCurve iterate_emphasis(std::span<const ResidualPair> pairs, int iterations, std::size_t bins, KrefMode mode) {
  require(iterations >= 1, "iterate_emphasis: iteration count must be at least 1");
  WeightScheme weight = WeightScheme::baseline();
  EmphasisCurve curve;
  for (int it = 1; it <= iterations; ++it) {
    if (mode == KrefMode::leave_one_out) {
      curve = regressogram_1d_loo(pairs, weight, bins);
    } else {
      FingerprintOptions raw;
      raw.clean = false;
      const FingerprintEstimate kref = estimate_fingerprint(pairs, weight, raw);
      curve = regressogram_1d(pairs, kref.plane, bins);
    }
    check_not_degenerate(curve, it);
    if (it < iterations) weight = WeightScheme::emphasis(curve);
  }
  return curve;
}

}  // namespace prnu
