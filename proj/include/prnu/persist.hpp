// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>

#include "prnu/detection.hpp"
#include "prnu/emphasis.hpp"
#include "prnu/fingerprint.hpp"
#include "prnu/roc.hpp"
#include "prnu/transfer.hpp"

namespace prnu {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text);

using KeyValues = std::map<std::string, std::string>;
/// "key=value" lines; blank lines and '#' comments are skipped.
KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const std::filesystem::path& path, const KeyValues& kv);

/// Header `bin_center,value,count`, one row per bin, then `scale,<a>`.
void write_emphasis_csv(const std::filesystem::path& path, const EmphasisCurve& curve);
EmphasisCurve read_emphasis_csv(const std::filesystem::path& path);

/// B x B value grid ("nan" for invalid cells) and the parallel count grid.
void write_phi_csv(const std::filesystem::path& values_path, const std::filesystem::path& counts_path,
                   const PhiMatrix& phi);

/// Header `u,h`, one row per grid point, then `a,<a>,epsilon,<epsilon>`.
void write_transfer_csv(const std::filesystem::path& path, const TransferCurve& curve);
TransferCurve read_transfer_csv(const std::filesystem::path& path);

/// Plane file plus "<path>.meta" with scheme, L, starved-pixel count.
void write_fingerprint(const std::filesystem::path& path, const FingerprintEstimate& fp);
ImagePlane read_fingerprint(const std::filesystem::path& path, KeyValues* meta = nullptr);

/// Header `pce,shift_row,shift_col,aligned,label`.
void write_scores_csv(const std::filesystem::path& path, std::span<const DetectionScore> scores);
std::vector<DetectionScore> read_scores_csv(const std::filesystem::path& path);

/// Header `fpr,tpr,threshold`, then `tpr_ceiling,<c>`.
void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve);

/// Residual as "<stem>.w", denoised plane as "<stem>.x".
void write_residual_pair(const std::filesystem::path& stem, const ResidualPair& pair);
ResidualPair read_residual_pair(const std::filesystem::path& stem);

}  // namespace prnu
