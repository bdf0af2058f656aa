// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "luthier/dtype.hpp"

namespace luthier {

/// `__metadata__` entries in header order.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Header cap; larger headers are rejected before allocation.
inline constexpr std::uint64_t kMaxHeaderBytes = 100'000'000;

struct TensorMeta {
    DType dtype = DType::F32;
    std::vector<std::uint64_t> shape;
    std::uint64_t begin = 0;  // relative to payload start
    std::uint64_t end = 0;

    /// Product of the dimensions; 1 for a scalar (empty shape).
    std::uint64_t element_count() const noexcept;
    std::uint64_t byte_size() const noexcept { return end - begin; }

    bool operator==(const TensorMeta&) const = default;
};

/// A tensor's raw little-endian bytes, not converted.
struct TensorData {
    TensorMeta meta;
    std::vector<std::byte> bytes;

    std::vector<float> to_f32() const;
    static TensorData from_f32(std::span<const float> values, DType dtype,
                               std::vector<std::uint64_t> shape);
};

/**
 * Read-only view of a single-file tensor archive:
 * `[u64 LE header length][JSON header][payload]`.
 *
 * Opening parses and validates the header only. Tensor payloads are read on
 * demand with positioned reads, so concurrent `read` calls are safe and a read
 * touches only that tensor's byte range.
 */
class TensorArchive {
public:
    static TensorArchive open(const std::filesystem::path& path);

    /// Tensor names in ascending payload offset order.
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }
    bool contains(std::string_view name) const;
    const TensorMeta& meta(std::string_view name) const;

    const std::optional<Metadata>& metadata() const noexcept { return metadata_; }

    TensorData read(std::string_view name) const;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::uint64_t payload_offset() const noexcept { return payload_offset_; }
    std::uint64_t payload_size() const noexcept { return payload_size_; }
    /// Payload bytes fetched so far across all reads.
    std::uint64_t bytes_read() const noexcept;

private:
    struct File;

    std::filesystem::path path_;
    std::shared_ptr<File> file_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, TensorMeta> entries_;
    std::optional<Metadata> metadata_;
    std::uint64_t payload_offset_ = 0;
    std::uint64_t payload_size_ = 0;
};

TensorData read_tensor(const TensorArchive& archive, std::string_view name);

struct ArchiveEntry {
    std::string name;
    DType dtype = DType::F32;
    std::vector<std::uint64_t> shape;
};

/**
 * Streaming writer. The full layout is declared up front so the header can be
 * emitted first; tensor bytes are then appended in layout order. Output goes
 * to `<path>.tmp` and is renamed into place by `commit()`; an uncommitted
 * writer removes its temporary file.
 */
class ArchiveWriter {
public:
    ArchiveWriter(std::filesystem::path path, std::vector<ArchiveEntry> layout,
                  std::optional<Metadata> metadata);
    ~ArchiveWriter();

    ArchiveWriter(const ArchiveWriter&) = delete;
    ArchiveWriter& operator=(const ArchiveWriter&) = delete;

    void append(std::string_view name, std::span<const std::byte> bytes);
    void commit();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Serialized header (including the 8-byte length prefix) for a layout.
std::string encode_header(const std::vector<ArchiveEntry>& layout,
                          const std::optional<Metadata>& metadata);

void write_archive(const std::vector<std::pair<std::string, TensorData>>& entries,
                   const std::optional<Metadata>& metadata, const std::filesystem::path& path);

}  // namespace luthier
