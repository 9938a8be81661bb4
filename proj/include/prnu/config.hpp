// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "prnu/persist.hpp"
#include "prnu/preprocess.hpp"

namespace prnu {

/// Device-identification experiment settings. Defaults follow the full
/// protocol; desk-scale runs override sizes and repetition counts.
struct ExperimentConfig {
  // Data: "synthetic" or an ingest cache directory.
  std::string source = "synthetic";
  std::size_t devices = 3;
  std::size_t images_per_device = 40;
  std::size_t image_height = 2048;
  std::size_t image_width = 2048;
  std::string transfer = "smoothstep";
  double sigma_k = 0.05;
  double sigma_n = 0.01;
  double scene_correlation = 6.0;
  double scene_low = 0.02;
  double scene_high = 0.9;

  // Protocol.
  std::size_t l_emphasis = 10;
  std::size_t l_train = 15;
  std::size_t l_test = 15;
  std::size_t square = 2000;
  std::size_t patch = 512;
  std::size_t bins = 32;
  int iterations = 2;
  std::size_t shuffles = 10;
  std::size_t origins = 10;
  std::size_t crops = 10;
  std::size_t h0_per_device = 100;  // per (shuffle, origin, crop)
  double fpr_target = 0.01;
  int neighborhood = 11;
  bool leave_one_out = true;

  // Preprocessing.
  double sigma0 = 3.0;
  bool clean = true;

  std::uint64_t seed = 0;
  bool seed_set = false;

  /// Applies recognized keys; unknown keys are rejected.
  void apply(const KeyValues& kv);
  KeyValues to_key_values() const;
  /// FNV-1a over the canonical key=value text.
  std::uint64_t hash() const;
  DenoiseParams denoise_params() const;
  bool synthetic() const { return source == "synthetic"; }
  void validate() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace prnu
