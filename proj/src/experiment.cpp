// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/experiment.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>

#include "prnu/emphasis.hpp"
#include "prnu/errors.hpp"
#include "prnu/fingerprint.hpp"
#include "prnu/persist.hpp"
#include "prnu/rng.hpp"
#include "prnu/simd.hpp"
#include "prnu/version.hpp"

namespace fs = std::filesystem;

namespace prnu {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs body(i) for i in [0, n) across OpenMP threads and rethrows the first
// failure (lowest index) afterwards.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> failures(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      failures[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

std::size_t uniform_index(Rng& rng, std::size_t upper_inclusive) {
  return std::uniform_int_distribution<std::size_t>(0, upper_inclusive)(rng);
}

struct Placement {
  std::size_t row = 0;
  std::size_t col = 0;
};

Placement random_placement(Rng& rng, std::size_t h, std::size_t w, std::size_t size) {
  require(h >= size && w >= size, "placement: window larger than the image");
  const std::size_t r = uniform_index(rng, h - size);
  const std::size_t c = uniform_index(rng, w - size);
  return {r, c};
}

std::vector<WeightScheme> schemes_for(const EmphasisCurve& curve) {
  return {WeightScheme::baseline(), WeightScheme::emphasis(curve), WeightScheme::fixed_parabola()};
}

std::string device_tag(std::size_t d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "dev%02zu", d);
  return buf;
}

}  // namespace

ResidualPair crop_pair(const ResidualPair& pair, std::size_t row0, std::size_t col0, std::size_t h, std::size_t w) {
  ResidualPair out;
  out.residual = pair.residual.crop(row0, col0, h, w);
  out.denoised = pair.denoised.crop(row0, col0, h, w);
  out.cleaned = pair.cleaned;
  return out;
}

SyntheticPopulation::SyntheticPopulation(const ExperimentConfig& config) {
  config.validate();
  require(config.synthetic(), "SyntheticPopulation: config source is not synthetic");
  const TransferSpec spec = TransferSpec::parse(config.transfer);
  const DenoiseParams params = config.denoise_params();
  const std::size_t nd = config.devices, ni = config.images_per_device;
  const std::size_t h = config.image_height, w = config.image_width;
  const SceneOptions scene{config.scene_correlation, config.scene_low, config.scene_high};

  prnu_.resize(nd);
  for (std::size_t d = 0; d < nd; ++d) prnu_[d] = make_prnu(derive_seed(config.seed, "prnu", {d}), h, w, config.sigma_k);
  pairs_.assign(nd, std::vector<ResidualPair>(ni));
  std::vector<double> clip(nd * ni, 0.0);
  parallel_for(nd * ni, [&](std::size_t job) {
    const std::size_t d = job / ni, i = job % ni;
    const ImagePlane z = smooth_scene(derive_seed(config.seed, "scene", {d, i}), h, w, scene);
    const Capture cap = simulate_capture(z, spec, prnu_[d], config.sigma_n, derive_seed(config.seed, "noise", {d, i}));
    clip[job] = cap.clip_fraction();
    pairs_[d][i] = extract_residual(std::span<const ImagePlane>(&cap.image, 1), params, config.clean);
  });
  max_clip_ = clip.empty() ? 0.0 : *std::max_element(clip.begin(), clip.end());
}

std::string SyntheticPopulation::device_name(std::size_t device) const { return device_tag(device); }

CachedDataset::CachedDataset(const fs::path& cache_dir) : dir_(cache_dir) {
  std::map<std::string, std::vector<ManifestEntry>> grouped;
  for (auto& e : read_manifest(cache_dir)) grouped[e.device].push_back(e);
  for (auto& [name, list] : grouped) {
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    devices_.push_back(name);
    entries_.push_back(std::move(list));
  }
}

ResidualPair CachedDataset::load(std::size_t device, std::size_t image) const {
  return read_residual_pair(dir_ / entries_.at(device).at(image).residual);
}

const SchemeResult& ExperimentResult::scheme(const std::string& name) const {
  for (const auto& s : schemes)
    if (s.scheme == name) return s;
  throw InvalidArgument("no scheme named " + name);
}

SplitIndices draw_splits(const ExperimentConfig& config, std::size_t shuffle, std::size_t device, std::size_t available) {
  const std::size_t needed = config.l_emphasis + config.l_train + config.l_test;
  require(available >= needed, "experiment: insufficient residuals for the splits");
  std::vector<std::size_t> order(available);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(config.seed, "split", {shuffle, device}));
  std::shuffle(order.begin(), order.end(), rng);
  SplitIndices out;
  const auto at = [&](std::size_t n) { return order.begin() + static_cast<std::ptrdiff_t>(n); };
  out.emphasis.assign(at(0), at(config.l_emphasis));
  out.train.assign(at(config.l_emphasis), at(config.l_emphasis + config.l_train));
  out.test.assign(at(config.l_emphasis + config.l_train), at(needed));
  return out;
}

ExperimentResult run_device_id(const ExperimentConfig& config, const ResidualSource& source) {
  config.validate();
  require(config.seed_set, "experiment: a root seed is required");
  const std::size_t nd = source.device_count();
  require(nd >= 2, "experiment: need at least 2 devices, found " + std::to_string(nd));
  const std::size_t needed = config.l_emphasis + config.l_train + config.l_test;
  std::string shortfall;
  for (std::size_t d = 0; d < nd; ++d)
    if (source.image_count(d) < needed)
      shortfall += " " + source.device_name(d) + " has " + std::to_string(source.image_count(d)) + ";";
  require(shortfall.empty(), "experiment: insufficient residuals (need " + std::to_string(needed) +
                                 " per device):" + shortfall);

  const std::uint64_t root = config.seed;
  const std::size_t sq = config.square, ps = config.patch;
  const std::size_t S = config.shuffles, O = config.origins, C = config.crops;
  const std::size_t n_schemes = 3;

  ExperimentResult result;
  result.config = config;
  for (std::size_t d = 0; d < nd; ++d) result.device_names.push_back(source.device_name(d));
  result.curves.assign(nd, std::vector<EmphasisCurve>(S));
  result.splits.assign(nd, std::vector<SplitIndices>(S));

  // Per device and scheme, scores in (shuffle, origin, crop, sample) order.
  std::vector<std::vector<std::vector<DetectionScore>>> h1(n_schemes, std::vector<std::vector<DetectionScore>>(nd));
  auto h0 = h1;
  double t_emphasis = 0.0, t_fingerprint = 0.0, t_scoring = 0.0;

  for (std::size_t s = 0; s < S; ++s) {
    std::vector<SplitIndices> splits(nd);
    for (std::size_t d = 0; d < nd; ++d) {
      splits[d] = draw_splits(config, s, d, source.image_count(d));
      result.splits[d][s] = splits[d];
    }
    auto load = [&](std::size_t d, const std::vector<std::size_t>& idx) {
      std::vector<ResidualPair> out(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) out[i] = source.load(d, idx[i]);
      return out;
    };

    auto t0 = Clock::now();
    parallel_for(nd, [&](std::size_t d) {
      const auto pairs = load(d, splits[d].emphasis);
      result.curves[d][s] = iterate_emphasis(pairs, config.iterations, config.bins,
                                             config.leave_one_out ? KrefMode::leave_one_out : KrefMode::shared);
    });
    t_emphasis += seconds_since(t0);

    std::vector<std::vector<ResidualPair>> train(nd), test(nd);
    for (std::size_t d = 0; d < nd; ++d) {
      train[d] = load(d, splits[d].train);
      test[d] = load(d, splits[d].test);
    }

    for (std::size_t o = 0; o < O; ++o) {
      t0 = Clock::now();
      std::vector<Placement> origin(nd);
      std::vector<std::vector<WeightScheme>> weights(nd);
      std::vector<std::vector<std::unique_ptr<FingerprintSpectrum>>> spectra(nd);
      for (std::size_t d = 0; d < nd; ++d) {
        Rng rng(derive_seed(root, "origin", {s, o, d}));
        const auto& first = train[d][0].residual;
        origin[d] = random_placement(rng, first.height(), first.width(), sq);
        weights[d] = schemes_for(result.curves[d][s]);
        spectra[d].resize(n_schemes);
      }
      parallel_for(nd * n_schemes, [&](std::size_t job) {
        const std::size_t d = job / n_schemes, k = job % n_schemes;
        std::vector<ResidualPair> cropped;
        cropped.reserve(train[d].size());
        for (const auto& p : train[d]) cropped.push_back(crop_pair(p, origin[d].row, origin[d].col, sq, sq));
        FingerprintOptions opts;
        opts.clean = config.clean;
        const FingerprintEstimate fp = estimate_fingerprint(cropped, weights[d][k], opts);
        spectra[d][k] = std::make_unique<FingerprintSpectrum>(fp.plane);
      });
      t_fingerprint += seconds_since(t0);

      t0 = Clock::now();
      for (std::size_t c = 0; c < C; ++c) {
        const std::size_t n1 = config.l_test, n0 = config.h0_per_device;
        const std::size_t per_device = n1 + n0;
        std::vector<std::array<DetectionScore, 3>> scores(nd * per_device);
        parallel_for(nd * per_device, [&](std::size_t job) {
          const std::size_t d = job / per_device, k = job % per_device;
          ResidualPair patch;
          std::optional<Shift> truth;
          if (k < n1) {
            Rng rng(derive_seed(root, "h1-crop", {s, o, c, d, k}));
            const Placement p = random_placement(rng, sq, sq, ps);
            patch = crop_pair(test[d][k], origin[d].row + p.row, origin[d].col + p.col, ps, ps);
            truth = Shift{static_cast<long>(p.row), static_cast<long>(p.col)};
          } else {
            Rng rng(derive_seed(root, "h0-sample", {s, o, c, d, k - n1}));
            std::size_t other = uniform_index(rng, nd - 2);
            if (other >= d) ++other;
            const std::size_t image = uniform_index(rng, source.image_count(other) - 1);
            const ResidualPair full = source.load(other, image);
            const Placement p = random_placement(rng, full.residual.height(), full.residual.width(), ps);
            patch = crop_pair(full, p.row, p.col, ps, ps);
          }
          for (std::size_t m = 0; m < n_schemes; ++m)
            scores[job][m] = align_and_score(*spectra[d][m], weights[d][m].plane(patch.denoised), patch.residual,
                                             truth, config.neighborhood);
        });
        for (std::size_t d = 0; d < nd; ++d)
          for (std::size_t k = 0; k < per_device; ++k)
            for (std::size_t m = 0; m < n_schemes; ++m)
              (k < n1 ? h1 : h0)[m][d].push_back(scores[d * per_device + k][m]);
      }
      t_scoring += seconds_since(t0);
    }
  }

  const auto t0 = Clock::now();
  const char* names[] = {"baseline", "emphasis", "fixed"};
  for (std::size_t m = 0; m < n_schemes; ++m) {
    SchemeResult sr;
    sr.scheme = names[m];
    double total = 0.0;
    for (std::size_t d = 0; d < nd; ++d) {
      const RocCurve roc = roc_points(h1[m][d], h0[m][d]);
      sr.device_tpr.push_back(tpr_at_fpr(roc, config.fpr_target));
      sr.device_ceiling.push_back(roc.tpr_ceiling);
      sr.device_h1.push_back(h1[m][d].size());
      sr.device_h0.push_back(h0[m][d].size());
      total += sr.device_tpr.back();
      sr.h1.insert(sr.h1.end(), h1[m][d].begin(), h1[m][d].end());
      sr.h0.insert(sr.h0.end(), h0[m][d].begin(), h0[m][d].end());
    }
    sr.mean_tpr = total / static_cast<double>(nd);
    sr.pooled = roc_points(sr.h1, sr.h0);
    result.schemes.push_back(std::move(sr));
  }
  result.timings = {{"emphasis", t_emphasis},
                    {"fingerprint", t_fingerprint},
                    {"scoring", t_scoring},
                    {"roc", seconds_since(t0)}};
  return result;
}

ExperimentResult run_device_id(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  std::unique_ptr<ResidualSource> source;
  if (config.synthetic()) source = std::make_unique<SyntheticPopulation>(config);
  else source = std::make_unique<CachedDataset>(config.source);
  const double t_source = seconds_since(t0);
  ExperimentResult result = run_device_id(config, *source);
  result.timings.insert(result.timings.begin(), {"residuals", t_source});
  return result;
}

void write_experiment(const ExperimentResult& result, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "splits.csv", std::ios::binary);
    if (!out) throw IoError("cannot write splits.csv in " + out_dir.string());
    out << "device,shuffle,split,image\n";
    for (std::size_t d = 0; d < result.splits.size(); ++d)
      for (std::size_t s = 0; s < result.splits[d].size(); ++s) {
        const auto& sp = result.splits[d][s];
        for (const auto& [name, idx] : {std::pair{"emphasis", &sp.emphasis}, {"train", &sp.train}, {"test", &sp.test}})
          for (std::size_t i : *idx) out << result.device_names[d] << ',' << s << ',' << name << ',' << i << '\n';
      }
  }
  {
    std::ofstream out(out_dir / "summary.csv", std::ios::binary);
    if (!out) throw IoError("cannot write summary.csv in " + out_dir.string());
    out << "scheme,device,tpr_at_fpr,tpr_ceiling,h1_samples,h0_samples\n";
    for (const auto& s : result.schemes) {
      double ceiling = 0.0;
      std::size_t n1 = 0, n0 = 0;
      for (std::size_t d = 0; d < s.device_tpr.size(); ++d) {
        out << s.scheme << ',' << result.device_names[d] << ',' << format_double(s.device_tpr[d]) << ','
            << format_double(s.device_ceiling[d]) << ',' << s.device_h1[d] << ',' << s.device_h0[d] << '\n';
        ceiling += s.device_ceiling[d];
        n1 += s.device_h1[d];
        n0 += s.device_h0[d];
      }
      out << s.scheme << ",mean," << format_double(s.mean_tpr) << ','
          << format_double(ceiling / static_cast<double>(s.device_tpr.size())) << ',' << n1 << ',' << n0 << '\n';
    }
  }
  for (const auto& s : result.schemes) {
    write_roc_csv(out_dir / ("roc_" + s.scheme + ".csv"), s.pooled);
    write_scores_csv(out_dir / ("scores_" + s.scheme + "_h1.csv"), s.h1);
    write_scores_csv(out_dir / ("scores_" + s.scheme + "_h0.csv"), s.h0);
  }
  for (std::size_t d = 0; d < result.curves.size(); ++d) {
    const auto& reps = result.curves[d];
    if (reps.empty()) continue;
    std::ofstream out(out_dir / ("emphasis_" + result.device_names[d] + ".csv"), std::ios::binary);
    if (!out) throw IoError("cannot write emphasis csv in " + out_dir.string());
    out << "bin_center,mean,std,min_count\n";
    for (std::size_t b = 0; b < reps[0].bins(); ++b) {
      double sum = 0.0, sum2 = 0.0;
      std::uint64_t min_count = reps[0].counts[b];
      for (const auto& c : reps) {
        sum += c.values[b];
        min_count = std::min(min_count, c.counts[b]);
      }
      const double mean = sum / static_cast<double>(reps.size());
      for (const auto& c : reps) sum2 += (c.values[b] - mean) * (c.values[b] - mean);
      const double sd = reps.size() > 1 ? std::sqrt(sum2 / static_cast<double>(reps.size() - 1)) : 0.0;
      out << format_double(reps[0].center(b)) << ',' << format_double(mean) << ',' << format_double(sd) << ','
          << min_count << '\n';
    }
  }
  KeyValues manifest;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(result.config.hash()));
  manifest["config_hash"] = hash;
  manifest["toolkit_version"] = kVersion;
  manifest["simd"] = simd::isa_name(simd::active().isa);
  for (const auto& [k, v] : result.config.to_key_values()) manifest["config." + k] = v;
  for (const auto& t : result.timings) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", t.seconds);
    manifest["seconds." + t.stage] = buf;
  }
  write_key_values(out_dir / "run_manifest.txt", manifest);
}

}  // namespace prnu
