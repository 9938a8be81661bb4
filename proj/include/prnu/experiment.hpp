// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "prnu/config.hpp"
#include "prnu/detection.hpp"
#include "prnu/emphasis_curve.hpp"
#include "prnu/ingest.hpp"
#include "prnu/preprocess.hpp"
#include "prnu/roc.hpp"
#include "prnu/sensor_sim.hpp"

namespace prnu {

/// Residual pairs grouped by device.
class ResidualSource {
 public:
  virtual ~ResidualSource() = default;
  virtual std::size_t device_count() const = 0;
  virtual std::string device_name(std::size_t device) const = 0;
  virtual std::size_t image_count(std::size_t device) const = 0;
  virtual ResidualPair load(std::size_t device, std::size_t image) const = 0;
};

/// Devices simulated from the config: one PRNU per device, smooth random
/// scenes, the configured transfer curve, then the residual pipeline.
class SyntheticPopulation : public ResidualSource {
 public:
  explicit SyntheticPopulation(const ExperimentConfig& config);

  std::size_t device_count() const override { return prnu_.size(); }
  std::string device_name(std::size_t device) const override;
  std::size_t image_count(std::size_t device) const override { return pairs_[device].size(); }
  ResidualPair load(std::size_t device, std::size_t image) const override { return pairs_[device][image]; }

  const PrnuPattern& prnu(std::size_t device) const { return prnu_[device]; }
  double max_clip_fraction() const { return max_clip_; }

 private:
  std::vector<PrnuPattern> prnu_;
  std::vector<std::vector<ResidualPair>> pairs_;
  double max_clip_ = 0.0;
};

/// Residual pairs produced by `ingest`, read lazily from the cache.
class CachedDataset : public ResidualSource {
 public:
  explicit CachedDataset(const std::filesystem::path& cache_dir);

  std::size_t device_count() const override { return devices_.size(); }
  std::string device_name(std::size_t device) const override { return devices_[device]; }
  std::size_t image_count(std::size_t device) const override { return entries_[device].size(); }
  ResidualPair load(std::size_t device, std::size_t image) const override;

 private:
  std::filesystem::path dir_;
  std::vector<std::string> devices_;
  std::vector<std::vector<ManifestEntry>> entries_;
};

ResidualPair crop_pair(const ResidualPair& pair, std::size_t row0, std::size_t col0, std::size_t h, std::size_t w);

/// Image indices of one device's emphasis, training and test splits.
struct SplitIndices {
  std::vector<std::size_t> emphasis;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Shuffles the device's images with the ("split", shuffle, device) seed and
/// cuts the three disjoint splits from the front.
SplitIndices draw_splits(const ExperimentConfig& config, std::size_t shuffle, std::size_t device, std::size_t available);

struct SchemeResult {
  std::string scheme;
  std::vector<double> device_tpr;      // TPR at the target FPR per device
  std::vector<double> device_ceiling;  // aligned fraction per device
  std::vector<std::size_t> device_h1;
  std::vector<std::size_t> device_h0;
  double mean_tpr = 0.0;
  RocCurve pooled;                     // all devices together
  std::vector<DetectionScore> h1;      // fixed (device, shuffle, origin, crop, sample) order
  std::vector<DetectionScore> h0;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::string> device_names;
  std::vector<SchemeResult> schemes;              // baseline, emphasis, fixed
  std::vector<std::vector<EmphasisCurve>> curves;  // [device][shuffle]
  std::vector<std::vector<SplitIndices>> splits;   // [device][shuffle]
  std::vector<StageTiming> timings;

  const SchemeResult& scheme(const std::string& name) const;
};

/// Runs the cropped device-identification protocol: per shuffle the
/// emphasis is estimated on the emphasis split, then per origin three
/// fingerprints are built on the training split inside the square and
/// scored, per crop, against own-device test patches (H1, known shift) and
/// patches of other devices (H0, max over alignments).
ExperimentResult run_device_id(const ExperimentConfig& config, const ResidualSource& source);

/// Convenience overload building the source the config names.
ExperimentResult run_device_id(const ExperimentConfig& config);

/// summary.csv, splits.csv, roc_<scheme>.csv, scores_<scheme>_{h1,h0}.csv and
/// emphasis_<device>.csv (mean and std over shuffles) are deterministic;
/// run_manifest.txt also carries timings.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& out_dir);

}  // namespace prnu
