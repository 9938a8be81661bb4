// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "prnu/preprocess.hpp"

namespace prnu {

struct ManifestEntry {
  std::string device;
  std::string path;      // relative to the dataset root
  std::size_t height = 0;
  std::size_t width = 0;
  std::string checksum;  // FNV-1a 64 of the file bytes, hex
  std::string residual;  // stem relative to the cache directory
};

struct IngestReport {
  std::vector<ManifestEntry> entries;
  std::size_t computed = 0;
  std::size_t skipped = 0;
  std::vector<std::pair<std::string, std::string>> errors;  // path, message
};

/// Walks `<root>/device/<name>/*` (or `<root>/<name>/*` when there is no
/// "device" directory), extracts a residual pair per image into
/// `cache_dir`, and writes manifest.csv and errors.csv there. Entries whose
/// checksum and residual files are already present are skipped, unless the
/// preprocessing settings changed. Unreadable images are reported and
/// skipped; the run continues.
IngestReport ingest(const std::filesystem::path& dataset_dir, const std::filesystem::path& cache_dir,
                    const DenoiseParams& params, bool clean);

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& cache_dir);

std::string file_checksum(const std::filesystem::path& path);

}  // namespace prnu
