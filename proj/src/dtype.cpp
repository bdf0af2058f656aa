// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include "luthier/dtype.hpp"

#include <bit>
#include <cstring>

#include <fmt/core.h>

#include "luthier/error.hpp"

namespace luthier {

static_assert(std::endian::native == std::endian::little,
              "archive payloads are little-endian; big-endian hosts need byte swapping");

std::size_t dtype_width(DType dtype) noexcept {
    switch (dtype) {
    case DType::F32: return 4;
    case DType::F16:
    case DType::BF16: return 2;
    }
    return 0;
}

std::string_view dtype_name(DType dtype) noexcept {
    switch (dtype) {
    case DType::F32: return "F32";
    case DType::F16: return "F16";
    case DType::BF16: return "BF16";
    }
    return "?";
}

std::optional<DType> parse_dtype(std::string_view name) noexcept {
    if (name == "F32") return DType::F32;
    if (name == "F16") return DType::F16;
    if (name == "BF16") return DType::BF16;
    return std::nullopt;
}

float bf16_to_f32(std::uint16_t bits) noexcept {
    return std::bit_cast<float>(static_cast<std::uint32_t>(bits) << 16);
}

std::uint16_t f32_to_bf16(float value) noexcept {
    const auto x = std::bit_cast<std::uint32_t>(value);
    if ((x & 0x7FFFFFFFu) > 0x7F800000u) {
        auto r = static_cast<std::uint16_t>(x >> 16);
        // truncation dropped every payload bit; keep it a NaN
        if ((r & 0x7F) == 0) r |= 0x40;
        return r;
    }
    const std::uint32_t lsb = (x >> 16) & 1u;
    return static_cast<std::uint16_t>((x + 0x7FFFu + lsb) >> 16);
}

float f16_to_f32(std::uint16_t h) noexcept {
    const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
    const std::uint32_t exp = (h >> 10) & 0x1Fu;
    std::uint32_t mant = h & 0x3FFu;

    if (exp == 0) {
        if (mant == 0) return std::bit_cast<float>(sign);
        int e = -14;
        while ((mant & 0x400u) == 0) {
            mant <<= 1;
            --e;
        }
        mant &= 0x3FFu;
        return std::bit_cast<float>(sign | (static_cast<std::uint32_t>(e + 127) << 23) | (mant << 13));
    }
    if (exp == 0x1F) return std::bit_cast<float>(sign | 0x7F800000u | (mant << 13));
    return std::bit_cast<float>(sign | ((exp - 15 + 127) << 23) | (mant << 13));
}

std::uint16_t f32_to_f16(float value) noexcept {
    const auto x = std::bit_cast<std::uint32_t>(value);
    const auto sign = static_cast<std::uint16_t>((x >> 16) & 0x8000u);
    const std::uint32_t exp = (x >> 23) & 0xFFu;
    const std::uint32_t mant = x & 0x7FFFFFu;

    if (exp == 0xFF) {
        if (mant == 0) return sign | 0x7C00u;
        auto payload = static_cast<std::uint16_t>(mant >> 13);
        if (payload == 0) payload = 0x200;
        return sign | 0x7C00u | payload;
    }

    const int e = static_cast<int>(exp) - 127;
    if (e > 15) return sign | 0x7C00u;

    if (e >= -14) {
        auto h = static_cast<std::uint32_t>(((e + 15) << 10) | (mant >> 13));
        const std::uint32_t rem = mant & 0x1FFFu;
        if (rem > 0x1000u || (rem == 0x1000u && (h & 1u))) ++h;  // carry may reach inf
        return static_cast<std::uint16_t>(sign | h);
    }
    if (e < -25) return sign;

    // f16 subnormal: value = m * 2^(e-23), unit is 2^-24
    const std::uint32_t m = mant | 0x800000u;
    const int shift = -e - 1;
    std::uint32_t h = m >> shift;
    const std::uint32_t rem = m & ((1u << shift) - 1u);
    const std::uint32_t half = 1u << (shift - 1);
    if (rem > half || (rem == half && (h & 1u))) ++h;
    return static_cast<std::uint16_t>(sign | h);
}

std::vector<float> widen_to_f32(std::span<const std::byte> raw, DType dtype) {
    const std::size_t width = dtype_width(dtype);
    if (raw.size() % width != 0)
        throw InputError(fmt::format("buffer of {} bytes is not a whole number of {} elements",
                                     raw.size(), dtype_name(dtype)));
    const std::size_t n = raw.size() / width;
    std::vector<float> out(n);
    if (dtype == DType::F32) {
        std::memcpy(out.data(), raw.data(), raw.size());
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::uint16_t bits;
        std::memcpy(&bits, raw.data() + i * 2, 2);
        out[i] = dtype == DType::BF16 ? bf16_to_f32(bits) : f16_to_f32(bits);
    }
    return out;
}

std::vector<std::byte> narrow_from_f32(std::span<const float> values, DType dtype) {
    std::vector<std::byte> out(values.size() * dtype_width(dtype));
    if (dtype == DType::F32) {
        std::memcpy(out.data(), values.data(), out.size());
        return out;
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::uint16_t bits = dtype == DType::BF16 ? f32_to_bf16(values[i]) : f32_to_f16(values[i]);
        std::memcpy(out.data() + i * 2, &bits, 2);
    }
    return out;
}

}  // namespace luthier
