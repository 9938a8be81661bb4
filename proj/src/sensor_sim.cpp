// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/sensor_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "prnu/errors.hpp"
#include "prnu/rng.hpp"

namespace prnu {

namespace {

constexpr double kDiffStep = 1e-6;

std::vector<double> parse_numbers(std::string_view text, char sep) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = std::min(text.find(sep, pos), text.size());
    const std::string token(text.substr(pos, next - pos));
    require(!token.empty(), "transfer spec: empty number in '" + std::string(text) + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == token.size(), "transfer spec: bad number '" + token + "'");
    out.push_back(v);
    pos = next + 1;
  }
  return out;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Bernstein sum of ctrl over degree n = ctrl.size() - 1.
double bernstein(const std::vector<double>& ctrl, double u) {
  const int n = static_cast<int>(ctrl.size()) - 1;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) s += ctrl[i] * binomial(n, i) * std::pow(u, i) * std::pow(1.0 - u, n - i);
  return s;
}

}  // namespace

TransferSpec TransferSpec::gamma(double exponent, double c1) {
  require(std::isfinite(exponent) && exponent > 0.0, "gamma transfer: exponent must be positive");
  require(std::isfinite(c1) && c1 > 0.0 && c1 <= 1.0, "gamma transfer: c1 must lie in (0, 1]");
  return TransferSpec(Kind::gamma, {exponent, c1});
}

TransferSpec TransferSpec::smoothstep() { return TransferSpec(Kind::smoothstep, {}); }

TransferSpec TransferSpec::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  require(knots.size() >= 2, "piecewise-linear transfer: need at least two knots");
  require(knots.front() == std::pair<double, double>{0.0, 0.0} && knots.back() == std::pair<double, double>{1.0, 1.0},
          "piecewise-linear transfer: knots must start at (0,0) and end at (1,1)");
  std::vector<double> flat;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (i > 0) {
      require(knots[i].first > knots[i - 1].first && knots[i].second > knots[i - 1].second,
              "piecewise-linear transfer: knots must increase strictly");
    }
    flat.push_back(knots[i].first);
    flat.push_back(knots[i].second);
  }
  return TransferSpec(Kind::piecewise_linear, std::move(flat));
}

TransferSpec TransferSpec::polynomial(std::vector<double> control) {
  require(control.size() >= 2, "polynomial transfer: need at least two control values");
  require(control.front() == 0.0 && control.back() == 1.0, "polynomial transfer: control must run from 0 to 1");
  for (std::size_t i = 1; i < control.size(); ++i)
    require(control[i] > control[i - 1], "polynomial transfer: control values must increase strictly");
  return TransferSpec(Kind::polynomial, std::move(control));
}

TransferSpec TransferSpec::parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view args = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (name == "smoothstep") {
    require(args.empty(), "smoothstep takes no parameters");
    return smoothstep();
  }
  require(!args.empty(), "transfer spec '" + std::string(text) + "' needs parameters");
  if (name == "gamma") {
    const auto v = parse_numbers(args, ',');
    require(v.size() == 1 || v.size() == 2, "gamma spec: expected gamma:<exponent>[,<c1>]");
    return gamma(v[0], v.size() == 2 ? v[1] : 1.0);
  }
  if (name == "pwl") {
    std::vector<std::pair<double, double>> knots;
    std::size_t pos = 0;
    while (pos <= args.size()) {
      const std::size_t next = std::min(args.find(',', pos), args.size());
      const auto uv = parse_numbers(args.substr(pos, next - pos), ':');
      require(uv.size() == 2, "pwl spec: knots are written u:v");
      knots.emplace_back(uv[0], uv[1]);
      pos = next + 1;
    }
    return piecewise_linear(std::move(knots));
  }
  if (name == "poly") return polynomial(parse_numbers(args, ','));
  throw InvalidArgument("unknown transfer spec '" + std::string(text) + "'");
}

std::string TransferSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::gamma:
      os << "gamma:" << params_[0];
      if (params_[1] != 1.0) os << ',' << params_[1];
      break;
    case Kind::smoothstep:
      os << "smoothstep";
      break;
    case Kind::piecewise_linear:
      os << "pwl:";
      for (std::size_t i = 0; i < params_.size(); i += 2) os << (i ? "," : "") << params_[i] << ':' << params_[i + 1];
      break;
    case Kind::polynomial:
      os << "poly:";
      for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? "," : "") << params_[i];
      break;
  }
  return os.str();
}

double TransferSpec::evaluate(double u) const {
  switch (kind_) {
    case Kind::gamma:
      return params_[1] * std::pow(u, params_[0]);
    case Kind::smoothstep:
      return u * u * (3.0 - 2.0 * u);
    case Kind::piecewise_linear: {
      const std::size_t knots = params_.size() / 2;
      for (std::size_t i = 1; i < knots; ++i) {
        const double u0 = params_[2 * i - 2], v0 = params_[2 * i - 1];
        const double u1 = params_[2 * i], v1 = params_[2 * i + 1];
        if (u <= u1 || i + 1 == knots) return v0 + (v1 - v0) * (u - u0) / (u1 - u0);
      }
      return 1.0;
    }
    case Kind::polynomial:
      return bernstein(params_, u);
  }
  return 0.0;
}

double TransferSpec::operator()(double u) const {
  require(u >= 0.0 && u <= 1.0, "transfer curve evaluated outside [0,1]");
  return evaluate(u);
}

double TransferSpec::derivative(double u) const {
  require(u >= 0.0 && u <= 1.0, "transfer derivative evaluated outside [0,1]");
  switch (kind_) {
    case Kind::gamma:
      if (u == 0.0) return params_[0] < 1.0 ? HUGE_VAL : (params_[0] == 1.0 ? params_[1] : 0.0);
      return params_[1] * params_[0] * std::pow(u, params_[0] - 1.0);
    case Kind::smoothstep:
      return 6.0 * u * (1.0 - u);
    case Kind::polynomial: {
      const int n = static_cast<int>(params_.size()) - 1;
      std::vector<double> diffs(params_.size() - 1);
      for (int i = 0; i < n; ++i) diffs[i] = params_[i + 1] - params_[i];
      return n * bernstein(diffs, u);
    }
    case Kind::piecewise_linear: {
      const double lo = std::max(0.0, u - kDiffStep);
      const double hi = std::min(1.0, u + kDiffStep);
      return (evaluate(hi) - evaluate(lo)) / (hi - lo);
    }
  }
  return 0.0;
}

double TransferSpec::inverse(double x) const {
  const double top = upper();
  require(x >= 0.0 && x <= top, "transfer inverse: value outside the range of h");
  double lo = 0.0, hi = 1.0;
  // Run to full precision; 1e-10 absolute is the guaranteed floor.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (evaluate(mid) < x) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double eval_transfer(const TransferSpec& spec, double u) { return spec(u); }

double true_emphasis(const TransferSpec& spec, double x) {
  const double z = spec.inverse(x);
  if (z == 0.0) return 0.0;
  return z * spec.derivative(z);
}

PrnuPattern make_prnu(std::uint64_t seed, std::size_t height, std::size_t width, double sigma_k) {
  require(height >= 1 && width >= 1, "make_prnu: zero dimensions");
  require(std::isfinite(sigma_k) && sigma_k >= 0.0, "make_prnu: sigma_k must be nonnegative");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ImagePlane k(height, width);
  for (double& v : k.values()) v = normal(rng);
  return {std::move(k), sigma_k};
}

Capture simulate_capture(const ImagePlane& scene, const TransferSpec& spec, const PrnuPattern& prnu, double sigma_n,
                         std::uint64_t seed) {
  require(scene.same_shape(prnu.plane), "simulate_capture: scene and PRNU dimensions differ");
  require(std::isfinite(sigma_n) && sigma_n >= 0.0, "simulate_capture: sigma_n must be nonnegative");
  Capture out{ImagePlane(scene.height(), scene.width()), 0};
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sk = prnu.sigma_k;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const double z = scene[i];
    require(z >= 0.0 && z <= 1.0, "simulate_capture: scene values must lie in [0,1]");
    double arg = z + z * (sk * prnu.plane[i]);
    if (arg < 0.0 || arg > 1.0) {
      arg = std::clamp(arg, 0.0, 1.0);
      ++out.clipped;
    }
    double y = spec(arg);
    if (sigma_n > 0.0) y += sigma_n * normal(rng);
    out.image[i] = y;
  }
  return out;
}

ImagePlane smooth_scene(std::uint64_t seed, std::size_t height, std::size_t width, const SceneOptions& options) {
  require(height >= 1 && width >= 1, "smooth_scene: zero dimensions");
  require(options.low >= 0.0 && options.high <= 1.0 && options.low < options.high,
          "smooth_scene: need 0 <= low < high <= 1");
  require(options.correlation_px > 0.0, "smooth_scene: correlation length must be positive");
  Rng rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  ImagePlane noise(height, width);
  for (double& v : noise.values()) v = uniform(rng);

  // Separable periodic Gaussian blur.
  const double sigma = options.correlation_px;
  const long radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  for (long t = -radius; t <= radius; ++t) taps[t + radius] = std::exp(-0.5 * (t * t) / (sigma * sigma));
  const double norm = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (double& t : taps) t /= norm;

  // Periodic extension of one line, then a plain FIR pass.
  const long h = static_cast<long>(height), w = static_cast<long>(width);
  std::vector<double> line(static_cast<std::size_t>(std::max(h, w) + 2 * radius));
  const auto blur_line = [&](auto&& get, auto&& set, long n) {
    for (long i = -radius; i < n + radius; ++i) line[static_cast<std::size_t>(i + radius)] = get(((i % n) + n) % n);
    for (long i = 0; i < n; ++i) {
      double s = 0.0;
      for (long t = 0; t <= 2 * radius; ++t) s += taps[static_cast<std::size_t>(t)] * line[static_cast<std::size_t>(i + t)];
      set(i, s);
    }
  };
  for (long r = 0; r < h; ++r)
    blur_line([&](long c) { return noise(r, c); }, [&](long c, double v) { noise(r, c) = v; }, w);
  // Column pass row by row, same tap order as blur_line.
  ImagePlane blurred(height, width);
  for (long r = 0; r < h; ++r) {
    double* out = blurred.data() + r * w;
    for (long t = 0; t <= 2 * radius; ++t) {
      const double* in = noise.data() + (((r + t - radius) % h + h) % h) * w;
      const double tap = taps[static_cast<std::size_t>(t)];
      for (long c = 0; c < w; ++c) out[c] += tap * in[c];
    }
  }

  // Rank by value, ties by index.
  std::vector<std::pair<double, std::size_t>> order(blurred.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = {blurred[i], i};
  std::sort(order.begin(), order.end());
  ImagePlane scene(height, width);
  const double n = static_cast<double>(order.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank)
    scene[order[rank].second] = options.low + (options.high - options.low) * (static_cast<double>(rank) + 0.5) / n;
  return scene;
}

ImagePlane flat_scene(std::size_t height, std::size_t width, double level) {
  require(level >= 0.0 && level <= 1.0, "flat_scene: level must lie in [0,1]");
  return ImagePlane(height, width, level);
}

}  // namespace prnu
