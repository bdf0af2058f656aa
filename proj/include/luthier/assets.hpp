// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>
#include <vector>

namespace luthier {

/// Repository asset compiled into the library, addressed by its path under
/// `assets/`. Throws std::out_of_range for an unknown name.
std::string_view asset(std::string_view name);

std::vector<std::string_view> asset_names();

}  // namespace luthier
