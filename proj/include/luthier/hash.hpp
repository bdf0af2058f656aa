// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace luthier {

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Streams the file through SHA-256. Throws IoError if unreadable.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace luthier
