// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace luthier {

enum class DType : std::uint8_t { F32, F16, BF16 };

std::size_t dtype_width(DType dtype) noexcept;
std::string_view dtype_name(DType dtype) noexcept;
std::optional<DType> parse_dtype(std::string_view name) noexcept;

// Scalar conversions. Widening is exact. Narrowing rounds to nearest, ties to
// even; NaN payloads survive where they fit and stay NaN where they don't.
float bf16_to_f32(std::uint16_t bits) noexcept;
std::uint16_t f32_to_bf16(float value) noexcept;
float f16_to_f32(std::uint16_t bits) noexcept;
std::uint16_t f32_to_f16(float value) noexcept;

/// Decodes a little-endian element buffer into f32. `raw.size()` must be a
/// multiple of the dtype width.
std::vector<float> widen_to_f32(std::span<const std::byte> raw, DType dtype);

/// Encodes f32 values into a little-endian buffer of the given dtype.
std::vector<std::byte> narrow_from_f32(std::span<const float> values, DType dtype);

}  // namespace luthier
