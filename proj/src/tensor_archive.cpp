// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include "luthier/tensor_archive.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "luthier/error.hpp"

namespace luthier {

using ojson = nlohmann::ordered_json;

std::uint64_t TensorMeta::element_count() const noexcept {
    std::uint64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

std::vector<float> TensorData::to_f32() const {
    return widen_to_f32(bytes, meta.dtype);
}

TensorData TensorData::from_f32(std::span<const float> values, DType dtype,
                                std::vector<std::uint64_t> shape) {
    TensorData t;
    t.bytes = narrow_from_f32(values, dtype);
    t.meta.dtype = dtype;
    t.meta.shape = std::move(shape);
    t.meta.begin = 0;
    t.meta.end = t.bytes.size();
    if (t.meta.element_count() != values.size())
        throw InputError(fmt::format("shape holds {} elements but {} values were given",
                                     t.meta.element_count(), values.size()));
    return t;
}

struct TensorArchive::File {
    int fd = -1;
    std::atomic<std::uint64_t> bytes_read{0};

    ~File() {
        if (fd >= 0) ::close(fd);
    }

    void read_at(std::uint64_t offset, std::byte* dst, std::uint64_t size, const std::string& what) {
        std::uint64_t done = 0;
        while (done < size) {
            const ssize_t n = ::pread(fd, dst + done, size - done, static_cast<off_t>(offset + done));
            if (n < 0 && errno == EINTR) continue;
            if (n < 0) throw IoError(fmt::format("{}: read failed: {}", what, std::strerror(errno)));
            if (n == 0) throw InputError(fmt::format("{}: truncated file", what));
            done += static_cast<std::uint64_t>(n);
        }
        bytes_read.fetch_add(size, std::memory_order_relaxed);
    }
};

namespace {

bool checked_mul(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return false;
    out = a * b;
    return true;
}

std::uint64_t json_u64(const ojson& v, const std::string& what) {
    if (!v.is_number_unsigned()) {
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
        throw InputError(fmt::format("{} must be a non-negative integer", what));
    }
    return v.get<std::uint64_t>();
}

TensorMeta parse_entry(const std::string& name, const ojson& e, const std::string& where) {
    if (!e.is_object())
        throw InputError(fmt::format("{}: entry '{}' is not an object", where, name));
    for (const auto& [key, _] : e.items()) {
        if (key != "dtype" && key != "shape" && key != "data_offsets")
            throw InputError(fmt::format("{}: entry '{}' has unknown key '{}'", where, name, key));
    }
    if (!e.contains("dtype") || !e.contains("shape") || !e.contains("data_offsets"))
        throw InputError(fmt::format("{}: entry '{}' needs dtype, shape and data_offsets", where, name));

    TensorMeta m;
    const auto& dt = e["dtype"];
    if (!dt.is_string())
        throw InputError(fmt::format("{}: entry '{}' dtype is not a string", where, name));
    auto parsed = parse_dtype(dt.get<std::string>());
    if (!parsed)
        throw InputError(fmt::format("{}: entry '{}' has unknown dtype '{}'", where, name, dt.get<std::string>()));
    m.dtype = *parsed;

    const auto& shape = e["shape"];
    if (!shape.is_array())
        throw InputError(fmt::format("{}: entry '{}' shape is not a list", where, name));
    for (const auto& d : shape) m.shape.push_back(json_u64(d, fmt::format("{}: '{}' dimension", where, name)));

    const auto& off = e["data_offsets"];
    if (!off.is_array() || off.size() != 2)
        throw InputError(fmt::format("{}: entry '{}' data_offsets must be [begin, end]", where, name));
    m.begin = json_u64(off[0], fmt::format("{}: '{}' begin offset", where, name));
    m.end = json_u64(off[1], fmt::format("{}: '{}' end offset", where, name));
    if (m.begin > m.end)
        throw InputError(fmt::format("{}: entry '{}' has begin {} > end {}", where, name, m.begin, m.end));

    std::uint64_t bytes = m.dtype == DType::F32 ? 4 : 2;
    for (auto d : m.shape) {
        if (!checked_mul(bytes, d, bytes))
            throw InputError(fmt::format("{}: entry '{}' shape overflows", where, name));
    }
    if (bytes != m.end - m.begin)
        throw InputError(fmt::format("{}: entry '{}' size mismatch: shape needs {} bytes, offsets span {}",
                                     where, name, bytes, m.end - m.begin));
    return m;
}

}  // namespace

TensorArchive TensorArchive::open(const std::filesystem::path& path) {
    const std::string where = path.string();
    TensorArchive a;
    a.path_ = path;
    a.file_ = std::make_shared<File>();
    a.file_->fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (a.file_->fd < 0)
        throw InputError(fmt::format("cannot open archive '{}': {}", where, std::strerror(errno)));

    struct stat st {};
    if (::fstat(a.file_->fd, &st) != 0)
        throw IoError(fmt::format("{}: stat failed: {}", where, std::strerror(errno)));
    const auto file_size = static_cast<std::uint64_t>(st.st_size);
    if (file_size < 8) throw InputError(fmt::format("{}: truncated file (no header length)", where));

    std::byte len_bytes[8];
    a.file_->read_at(0, len_bytes, 8, where);
    std::uint64_t header_len = 0;
    for (int i = 7; i >= 0; --i) header_len = (header_len << 8) | std::to_integer<std::uint64_t>(len_bytes[i]);
    if (header_len > kMaxHeaderBytes)
        throw InputError(fmt::format("{}: header of {} bytes exceeds the {} byte cap", where, header_len, kMaxHeaderBytes));
    if (header_len > file_size - 8)
        throw InputError(fmt::format("{}: truncated file (header declares {} bytes, {} available)",
                                     where, header_len, file_size - 8));

    std::string header(header_len, '\0');
    a.file_->read_at(8, reinterpret_cast<std::byte*>(header.data()), header_len, where);
    a.file_->bytes_read.store(0);

    std::set<std::string> seen;
    std::string duplicate;
    ojson doc;
    try {
        doc = ojson::parse(header, [&](int depth, ojson::parse_event_t event, ojson& parsed) {
            if (depth == 1 && event == ojson::parse_event_t::key) {
                auto key = parsed.get<std::string>();
                if (!seen.insert(key).second && duplicate.empty()) duplicate = key;
            }
            return true;
        });
    } catch (const nlohmann::json::exception& e) {
        throw InputError(fmt::format("{}: malformed JSON header: {}", where, e.what()));
    }
    if (!duplicate.empty()) throw InputError(fmt::format("{}: duplicate tensor name '{}'", where, duplicate));
    if (!doc.is_object()) throw InputError(fmt::format("{}: header is not a JSON object", where));

    a.payload_offset_ = 8 + header_len;
    a.payload_size_ = file_size - a.payload_offset_;

    std::vector<std::pair<std::string, TensorMeta>> entries;
    for (const auto& [key, value] : doc.items()) {
        if (key == "__metadata__") {
            if (!value.is_object())
                throw InputError(fmt::format("{}: __metadata__ is not an object", where));
            Metadata md;
            for (const auto& [mk, mv] : value.items()) {
                if (!mv.is_string())
                    throw InputError(fmt::format("{}: __metadata__ value for '{}' is not a string", where, mk));
                md.emplace_back(mk, mv.get<std::string>());
            }
            a.metadata_ = std::move(md);
            continue;
        }
        if (key.empty()) throw InputError(fmt::format("{}: empty tensor name", where));
        entries.emplace_back(key, parse_entry(key, value, where));
    }

    std::stable_sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
        return std::pair(x.second.begin, x.second.end) < std::pair(y.second.begin, y.second.end);
    });
    std::uint64_t cursor = 0;
    for (const auto& [name, m] : entries) {
        if (m.begin < cursor)
            throw InputError(fmt::format("{}: tensor '{}' overlaps the previous tensor", where, name));
        if (m.begin > cursor)
            throw InputError(fmt::format("{}: gap before tensor '{}' at payload offset {}", where, name, cursor));
        cursor = m.end;
    }
    if (cursor > a.payload_size_)
        throw InputError(fmt::format("{}: tensors extend past end of file ({} > {} payload bytes)",
                                     where, cursor, a.payload_size_));
    if (cursor < a.payload_size_)
        throw InputError(fmt::format("{}: {} trailing payload bytes not covered by any tensor",
                                     where, a.payload_size_ - cursor));

    for (auto& [name, m] : entries) {
        a.names_.push_back(name);
        a.entries_.emplace(name, std::move(m));
    }
    return a;
}

bool TensorArchive::contains(std::string_view name) const {
    return entries_.find(std::string(name)) != entries_.end();
}

const TensorMeta& TensorArchive::meta(std::string_view name) const {
    auto it = entries_.find(std::string(name));
    if (it == entries_.end())
        throw InputError(fmt::format("{}: unknown tensor '{}'", path_.string(), name));
    return it->second;
}

TensorData TensorArchive::read(std::string_view name) const {
    TensorData t;
    t.meta = meta(name);
    t.bytes.resize(t.meta.byte_size());
    if (!t.bytes.empty())
        file_->read_at(payload_offset_ + t.meta.begin, t.bytes.data(), t.bytes.size(),
                       fmt::format("{}: tensor '{}'", path_.string(), name));
    return t;
}

std::uint64_t TensorArchive::bytes_read() const noexcept {
    return file_ ? file_->bytes_read.load(std::memory_order_relaxed) : 0;
}

TensorData read_tensor(const TensorArchive& archive, std::string_view name) {
    return archive.read(name);
}

std::string encode_header(const std::vector<ArchiveEntry>& layout, const std::optional<Metadata>& metadata) {
    std::string json = "{";
    bool first = true;
    if (metadata) {
        ojson md(ojson::value_t::object);
        for (const auto& [k, v] : *metadata) {
            if (md.contains(k)) throw InputError(fmt::format("duplicate metadata key '{}'", k));
            md[k] = v;
        }
        json += "\"__metadata__\":" + md.dump();
        first = false;
    }
    std::uint64_t cursor = 0;
    for (const auto& e : layout) {
        std::uint64_t bytes = dtype_width(e.dtype);
        for (auto d : e.shape) {
            if (!checked_mul(bytes, d, bytes))
                throw InputError(fmt::format("tensor '{}' shape overflows", e.name));
        }
        if (!first) json += ',';
        first = false;
        json += nlohmann::json(e.name).dump();
        json += fmt::format(":{{\"dtype\":\"{}\",\"shape\":[", dtype_name(e.dtype));
        for (std::size_t i = 0; i < e.shape.size(); ++i) json += fmt::format("{}{}", i ? "," : "", e.shape[i]);
        json += fmt::format("],\"data_offsets\":[{},{}]}}", cursor, cursor + bytes);
        cursor += bytes;
    }
    json += '}';
    // pad so the payload starts 8-byte aligned
    json.append((8 - json.size() % 8) % 8, ' ');

    std::string out(8, '\0');
    std::uint64_t n = json.size();
    for (int i = 0; i < 8; ++i) out[i] = static_cast<char>((n >> (8 * i)) & 0xFF);
    return out + json;
}

struct ArchiveWriter::Impl {
    std::filesystem::path path;
    std::filesystem::path tmp;
    std::vector<ArchiveEntry> layout;
    std::vector<std::uint64_t> sizes;
    std::size_t next = 0;
    std::ofstream out;
    bool committed = false;
};

ArchiveWriter::ArchiveWriter(std::filesystem::path path, std::vector<ArchiveEntry> layout,
                             std::optional<Metadata> metadata)
    : impl_(std::make_unique<Impl>()) {
    std::set<std::string_view> names;
    for (const auto& e : layout) {
        if (e.name.empty()) throw InputError("tensor names must be non-empty");
        if (e.name == "__metadata__") throw InputError("'__metadata__' is reserved");
        if (!names.insert(e.name).second) throw InputError(fmt::format("duplicate tensor name '{}'", e.name));
    }
    const std::string header = encode_header(layout, metadata);

    impl_->path = std::move(path);
    impl_->tmp = impl_->path;
    impl_->tmp += ".tmp";
    impl_->layout = std::move(layout);
    for (const auto& e : impl_->layout) {
        std::uint64_t n = dtype_width(e.dtype);
        for (auto d : e.shape) n *= d;
        impl_->sizes.push_back(n);
    }
    impl_->out.open(impl_->tmp, std::ios::binary | std::ios::trunc);
    if (!impl_->out) throw IoError(fmt::format("cannot create '{}'", impl_->tmp.string()));
    impl_->out.write(header.data(), static_cast<std::streamsize>(header.size()));
}

ArchiveWriter::~ArchiveWriter() {
    if (impl_ && !impl_->committed) {
        impl_->out.close();
        std::error_code ec;
        std::filesystem::remove(impl_->tmp, ec);
    }
}

void ArchiveWriter::append(std::string_view name, std::span<const std::byte> bytes) {
    if (impl_->next >= impl_->layout.size())
        throw InputError(fmt::format("tensor '{}' appended past the declared layout", name));
    const auto& e = impl_->layout[impl_->next];
    if (e.name != name)
        throw InputError(fmt::format("expected tensor '{}' next, got '{}'", e.name, name));
    if (bytes.size() != impl_->sizes[impl_->next])
        throw InputError(fmt::format("tensor '{}' buffer has {} bytes, layout needs {}", name, bytes.size(),
                                     impl_->sizes[impl_->next]));
    impl_->out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!impl_->out) throw IoError(fmt::format("write to '{}' failed", impl_->tmp.string()));
    ++impl_->next;
}

void ArchiveWriter::commit() {
    if (impl_->next != impl_->layout.size())
        throw InputError(fmt::format("only {} of {} tensors written", impl_->next, impl_->layout.size()));
    impl_->out.flush();
    impl_->out.close();
    if (!impl_->out) throw IoError(fmt::format("closing '{}' failed", impl_->tmp.string()));
    std::error_code ec;
    std::filesystem::rename(impl_->tmp, impl_->path, ec);
    if (ec) throw IoError(fmt::format("rename to '{}' failed: {}", impl_->path.string(), ec.message()));
    impl_->committed = true;
}

void write_archive(const std::vector<std::pair<std::string, TensorData>>& entries,
                   const std::optional<Metadata>& metadata, const std::filesystem::path& path) {
    std::vector<ArchiveEntry> layout;
    layout.reserve(entries.size());
    for (const auto& [name, t] : entries) layout.push_back({name, t.meta.dtype, t.meta.shape});
    ArchiveWriter w(path, std::move(layout), metadata);
    for (const auto& [name, t] : entries) w.append(name, t.bytes);
    w.commit();
}

}  // namespace luthier
