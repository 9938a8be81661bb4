// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace prnu {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace prnu
