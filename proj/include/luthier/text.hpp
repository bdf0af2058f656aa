// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace luthier::text {

/// Decodes UTF-8; malformed sequences become U+FFFD.
std::u32string decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view s);

/// Code-point count.
std::size_t utf8_length(std::string_view s);

/// Simple case folding for Latin scripts (ASCII, Latin-1, Latin Extended-A).
char32_t fold_case(char32_t cp) noexcept;
bool is_letter(char32_t cp) noexcept;
bool is_space(char32_t cp) noexcept;

/// Case-folds and collapses whitespace runs to one ASCII space, trimmed.
std::string fold_and_collapse(std::string_view s);

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

}  // namespace luthier::text
