// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "prnu/errors.hpp"

namespace prnu {

namespace {

struct Knots {
  std::vector<double> t;
  std::vector<double> g;

  double at(double x) const {
    if (x <= t.front()) return g.front();
    if (x >= t.back()) return g.back();
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - t.begin()), lo = hi - 1;
    const double s = (x - t[lo]) / (t[hi] - t[lo]);
    return g[lo] + s * (g[hi] - g[lo]);
  }
};

// Exact integral of g(t)/t over [s0, s1] when g is linear there.
double piece_integral(double s0, double s1, double g0, double g1) {
  if (s1 <= s0) return 0.0;
  const double slope = (g1 - g0) / (s1 - s0);
  const double intercept = g0 - slope * s0;
  return intercept * std::log1p((s1 - s0) / s0) + slope * (s1 - s0);
}

std::vector<double> make_grid(double epsilon, std::size_t m) {
  std::vector<double> grid(m);
  for (std::size_t i = 0; i < m; ++i)
    grid[i] = epsilon + (1.0 - epsilon) * static_cast<double>(i) / static_cast<double>(m - 1);
  grid.back() = 1.0;
  return grid;
}

TransferCurve integrate(const Knots& knots, double epsilon, std::size_t m) {
  require(epsilon > 0.0 && epsilon < 1.0, "recover_transfer: epsilon must lie in (0,1)");
  require(m >= 2, "recover_transfer: grid needs at least two points");
  TransferCurve out;
  out.epsilon = epsilon;
  out.grid = make_grid(epsilon, m);

  std::vector<double> cumulative(m, 0.0);
  std::size_t k = static_cast<std::size_t>(std::upper_bound(knots.t.begin(), knots.t.end(), epsilon) - knots.t.begin());
  for (std::size_t i = 1; i < m; ++i) {
    double s0 = out.grid[i - 1];
    const double s1 = out.grid[i];
    double acc = 0.0;
    // Split the grid cell at interior knots so each piece is linear in t.
    while (k < knots.t.size() && knots.t[k] < s1) {
      if (knots.t[k] > s0) {
        acc += piece_integral(s0, knots.t[k], knots.at(s0), knots.g[k]);
        s0 = knots.t[k];
      }
      ++k;
    }
    acc += piece_integral(s0, s1, knots.at(s0), knots.at(s1));
    cumulative[i] = cumulative[i - 1] + acc;
  }

  const double total = cumulative.back();
  require(std::isfinite(total) && total > 0.0, "recover_transfer: G(1) <= 0, the recovered curve would not increase");
  out.a = (1.0 - epsilon) / total;
  out.values.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.values[i] = epsilon + out.a * cumulative[i];
  for (std::size_t i = 1; i < m; ++i)
    if (out.values[i] < out.values[i - 1] - 1e-6)
      throw DegenerateError("recover_transfer: recovered curve decreases (negative emphasis)");
  return out;
}

}  // namespace

double TransferCurve::operator()(double u) const {
  const double x = std::clamp(u, epsilon, 1.0);
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  if (it == grid.end()) return values.back();
  const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  if (hi == 0) return values.front();
  const std::size_t lo = hi - 1;
  const double s = (x - grid[lo]) / (grid[hi] - grid[lo]);
  return values[lo] + s * (values[hi] - values[lo]);
}

TransferCurve recover_transfer(const EmphasisCurve& curve, double epsilon, std::size_t grid_size) {
  curve.validate();
  Knots knots;
  for (std::size_t i = 0; i < curve.bins(); ++i) {
    if (!curve.valid(i)) continue;
    knots.t.push_back(curve.center(i));
    knots.g.push_back(curve.values[i]);
  }
  require(knots.t.size() >= 2, "recover_transfer: need at least two valid bins");
  return integrate(knots, epsilon, grid_size);
}

TransferCurve recover_transfer_and_scale(EmphasisCurve& curve, double epsilon, std::size_t grid_size) {
  TransferCurve h = recover_transfer(curve, epsilon, grid_size);
  curve.scale = h.a;
  return h;
}

TransferCurve recover_transfer(const std::function<double(double)>& emphasis, double epsilon, std::size_t grid_size) {
  require(epsilon > 0.0 && epsilon < 1.0, "recover_transfer: epsilon must lie in (0,1)");
  require(grid_size >= 2, "recover_transfer: grid needs at least two points");
  Knots knots;
  knots.t = make_grid(epsilon, grid_size);
  knots.g.reserve(knots.t.size());
  for (double t : knots.t) knots.g.push_back(emphasis(t));
  return integrate(knots, epsilon, grid_size);
}

double gamma_linearity_score(const EmphasisCurve& curve) {
  curve.validate();
  require(curve.valid_bins() >= 3, "gamma_linearity_score: need at least three valid bins");
  double cv = 0.0, cc = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < curve.bins(); ++i) {
    if (!curve.valid(i)) continue;
    const double w = static_cast<double>(curve.counts[i]);
    const double c = curve.center(i), v = curve.values[i];
    cv += w * c * v;
    cc += w * c * c;
    vv += w * v * v;
  }
  require(vv > 0.0, "gamma_linearity_score: curve is identically zero");
  if (cv <= 0.0) return 0.0;
  return std::min(1.0, (cv * cv) / (cc * vv));
}

}  // namespace prnu
