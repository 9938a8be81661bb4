// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prnu/image.hpp"

namespace prnu {

/// Monotone transfer curve h: [0,1] -> [0,1] (camera response composed with
/// the rest of the in-camera pipeline). h(0) = 0 always; h(1) = 1 except for
/// gamma curves with c1 < 1, whose range is [0, c1].
class TransferSpec {
 public:
  enum class Kind { gamma, smoothstep, piecewise_linear, polynomial };

  /// h(u) = c1 * u^exponent, exponent > 0, 0 < c1 <= 1.
  static TransferSpec gamma(double exponent, double c1 = 1.0);
  /// h(u) = u^2 (3 - 2u).
  static TransferSpec smoothstep();
  /// Linear interpolation through (u, v) knots; must start at (0,0), end at
  /// (1,1) and increase strictly in both coordinates.
  static TransferSpec piecewise_linear(std::vector<std::pair<double, double>> knots);
  /// Bernstein polynomial with control values b[0] = 0 < b[1] < ... < b[n] = 1,
  /// which makes h strictly increasing on [0,1].
  static TransferSpec polynomial(std::vector<double> control);

  /// Parses "gamma:0.45", "gamma:0.45,0.9", "smoothstep",
  /// "pwl:0:0,0.3:0.6,1:1" or "poly:0,0.2,0.9,1".
  static TransferSpec parse(std::string_view text);
  std::string to_string() const;

  Kind kind() const { return kind_; }
  const std::vector<double>& parameters() const { return params_; }

  /// h(u); u must lie in [0,1].
  double operator()(double u) const;
  /// h'(u); analytic except for piecewise-linear curves (central difference).
  double derivative(double u) const;
  /// h^-1(x) by bisection to 1e-10; x must lie in [0, h(1)].
  double inverse(double x) const;
  double upper() const { return evaluate(1.0); }

 private:
  TransferSpec(Kind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {}
  double evaluate(double u) const;

  Kind kind_ = Kind::smoothstep;
  // gamma: {exponent, c1}; pwl: {u0, v0, u1, v1, ...}; polynomial: control values.
  std::vector<double> params_;
};

double eval_transfer(const TransferSpec& spec, double u);

/// Ground-truth emphasis at brightness x: z * h'(z) with z = h^-1(x).
double true_emphasis(const TransferSpec& spec, double x);

struct PrnuPattern {
  ImagePlane plane;  // i.i.d. N(0,1)
  double sigma_k = 0.0;
};

PrnuPattern make_prnu(std::uint64_t seed, std::size_t height, std::size_t width, double sigma_k);

struct Capture {
  ImagePlane image;
  std::size_t clipped = 0;  // pixels whose pre-transfer argument left [0,1]
  double clip_fraction() const { return image.empty() ? 0.0 : double(clipped) / double(image.size()); }
};

/// y = h(clip(z + z*sigma_k*k)) + n, n ~ N(0, sigma_n^2) i.i.d.
Capture simulate_capture(const ImagePlane& scene, const TransferSpec& spec, const PrnuPattern& prnu,
                         double sigma_n, std::uint64_t seed);

struct SceneOptions {
  double correlation_px = 6.0;  // Gaussian low-pass width
  double low = 0.0;
  double high = 1.0;
};

/// Low-pass filtered uniform noise, rank-mapped onto a uniform marginal over
/// [low, high] so every brightness bin receives samples.
ImagePlane smooth_scene(std::uint64_t seed, std::size_t height, std::size_t width, const SceneOptions& options = {});
ImagePlane flat_scene(std::size_t height, std::size_t width, double level);

}  // namespace prnu
