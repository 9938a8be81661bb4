// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used as test oracles.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "prnu/emphasis.hpp"
#include "prnu/image.hpp"
#include "prnu/preprocess.hpp"
#include "prnu/sensor_sim.hpp"

namespace oracle {

using prnu::ImagePlane;
using prnu::ResidualPair;

inline ImagePlane gaussian_plane(std::uint64_t seed, std::size_t h, std::size_t w, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sd);
  ImagePlane p(h, w);
  for (double& v : p.values()) v = n(rng);
  return p;
}

inline ImagePlane uniform_plane(std::uint64_t seed, std::size_t h, std::size_t w, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  ImagePlane p(h, w);
  for (double& v : p.values()) v = u(rng);
  return p;
}

// Linear scan for the bin holding x; the last bin is closed on the right.
inline std::size_t scan_bin(const std::vector<double>& edges, double x) {
  const std::size_t b = edges.size() - 1;
  if (x < edges[0]) return 0;
  for (std::size_t p = 0; p < b; ++p)
    if (x < edges[p + 1]) return p;
  return b - 1;
}

/// Cell-by-cell triple loop: for every cell, visit images i, then j != i,
/// then pixels, in the library's canonical image order.
inline prnu::PhiMatrix naive_regressogram_2d(std::span<const ResidualPair> pairs, std::size_t bins) {
  const auto order = prnu::canonical_order(pairs);
  prnu::PhiMatrix phi;
  phi.edges = prnu::uniform_edges(bins);
  phi.values.assign(bins * bins, std::numeric_limits<double>::quiet_NaN());
  phi.counts.assign(bins * bins, 0);
  phi.mask.assign(bins * bins, 0);
  const std::size_t n_pix = pairs[0].residual.size();
  for (std::size_t p = 0; p < bins; ++p)
    for (std::size_t q = 0; q < bins; ++q) {
      double sum = 0.0;
      std::uint64_t count = 0;
      for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = 0; j < pairs.size(); ++j) {
          if (i == j) continue;
          const auto& a = pairs[order[i]];
          const auto& b = pairs[order[j]];
          for (std::size_t n = 0; n < n_pix; ++n) {
            if (scan_bin(phi.edges, a.denoised[n]) != p || scan_bin(phi.edges, b.denoised[n]) != q) continue;
            sum += a.residual[n] * b.residual[n];
            ++count;
          }
        }
      if (count > 0) {
        phi.values[p * bins + q] = sum / static_cast<double>(count);
        phi.counts[p * bins + q] = count;
        phi.mask[p * bins + q] = 1;
      }
    }
  return phi;
}

struct Eigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;
};

/// Power iteration on m + shift*I so the dominant positive eigenvalue wins.
inline Eigenpair power_iteration(const Eigen::MatrixXd& m, int iterations = 20000) {
  const double shift = m.cwiseAbs().rowwise().sum().maxCoeff();
  const Eigen::MatrixXd a = m + shift * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows()).normalized();
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd next = (a * v).normalized();
    const bool done = (next - v).norm() < 1e-15;
    v = next;
    if (done) break;
  }
  if (v.sum() < 0) v = -v;
  return {v.dot(m * v), v};
}

/// rho(s) = sum_n r[n] t[(n + s) mod dims] / (|r| |t|), straight from the definition.
inline ImagePlane spatial_correlation(const ImagePlane& term, const ImagePlane& residual) {
  const std::size_t H = term.height(), W = term.width();
  double nt = 0.0, nr = 0.0;
  for (double v : term.values()) nt += v * v;
  for (double v : residual.values()) nr += v * v;
  ImagePlane out(H, W);
  for (std::size_t sr = 0; sr < H; ++sr)
    for (std::size_t sc = 0; sc < W; ++sc) {
      double acc = 0.0;
      for (std::size_t r = 0; r < residual.height(); ++r)
        for (std::size_t c = 0; c < residual.width(); ++c) acc += residual(r, c) * term((r + sr) % H, (c + sc) % W);
      out(sr, sc) = acc / std::sqrt(nt * nr);
    }
  return out;
}

/// sqrt(mean((est - truth)^2) / mean(truth^2)) over the selected entries.
inline double rms_relative(const std::vector<double>& est, const std::vector<double>& truth,
                           const std::vector<bool>& use) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (!use[i]) continue;
    num += (est[i] - truth[i]) * (est[i] - truth[i]);
    den += truth[i] * truth[i];
  }
  return std::sqrt(num / den);
}

/// Same after fitting the least-squares scale c in c * est ~ truth.
inline double rms_relative_scaled(const std::vector<double>& est, const std::vector<double>& truth,
                                  const std::vector<bool>& use) {
  double et = 0.0, ee = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i)
    if (use[i]) {
      et += est[i] * truth[i];
      ee += est[i] * est[i];
    }
  std::vector<double> scaled(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) scaled[i] = est[i] * et / ee;
  return rms_relative(scaled, truth, use);
}

/// True emphasis at every bin center of a curve (the regressogram targets).
inline std::vector<double> true_at_centers(const prnu::EmphasisCurve& c, const prnu::TransferSpec& spec) {
  std::vector<double> g(c.bins());
  for (std::size_t i = 0; i < c.bins(); ++i) g[i] = prnu::true_emphasis(spec, std::min(c.center(i), spec.upper()));
  return g;
}

/// Noiseless generalized residuals w = g(x) sigma_k k with x = h(z) on smooth
/// scenes; the denoiser is bypassed.
inline std::vector<ResidualPair> injected_pairs(const prnu::TransferSpec& spec, const ImagePlane& k, double sigma_k,
                                                std::size_t count, std::uint64_t seed,
                                                prnu::SceneOptions scene = {}) {
  std::vector<ResidualPair> pairs(count);
  for (std::size_t l = 0; l < count; ++l) {
    const ImagePlane z = prnu::smooth_scene(seed * 1000 + l, k.height(), k.width(), scene);
    ResidualPair& p = pairs[l];
    p.denoised = ImagePlane(k.height(), k.width());
    p.residual = ImagePlane(k.height(), k.width());
    for (std::size_t n = 0; n < k.size(); ++n) {
      p.denoised[n] = spec(z[n]);
      p.residual[n] = z[n] * spec.derivative(z[n]) * sigma_k * k[n];
    }
  }
  return pairs;
}

}  // namespace oracle
