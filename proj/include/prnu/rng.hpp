// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace prnu {

/// Derives an independent stream seed from a root seed, a purpose string
/// and a list of indices, e.g. derive_seed(root, "capture", {device, image}).
/// Any sub-experiment can be regenerated in isolation from the same triple.
std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose,
                          std::initializer_list<std::uint64_t> indices = {});

using Rng = std::mt19937_64;

}  // namespace prnu
