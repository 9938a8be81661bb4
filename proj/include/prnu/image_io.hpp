// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "prnu/image.hpp"

namespace prnu {

/// Loads an 8 or 16 bit grayscale or RGB PNG/TIFF, or a PRNUPLN1 plane
/// (".bin"), as 1 or 3 channels normalized to [0,1]. Alpha is dropped.
/// Throws IoError on unreadable or unsupported files.
std::vector<ImagePlane> load_image(const std::filesystem::path& path);

/// True for extensions load_image understands.
bool is_image_file(const std::filesystem::path& path);

/// Writes 1 or 3 channels as a 16 bit PNG; samples are clamped to [0,1].
void write_png16(const std::filesystem::path& path, const std::vector<ImagePlane>& channels);

}  // namespace prnu
