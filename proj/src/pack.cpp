// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include "luthier/pack.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/core.h>

#include "luthier/error.hpp"

namespace luthier {

void TokenCounter::validate() const {
    if (mode == Mode::ByteHeuristic && !(bytes_per_token > 0.0 && std::isfinite(bytes_per_token)))
        throw ConfigError(fmt::format("bytes_per_token = {} must be > 0", bytes_per_token));
}

TokenCounter TokenCounter::parse(std::string_view spec) {
    TokenCounter c;
    if (spec == "precomputed") {
        c.mode = Mode::Precomputed;
        return c;
    }
    if (spec == "byte") return c;
    if (spec.starts_with("byte:")) {
        const std::string num(spec.substr(5));
        char* end = nullptr;
        c.bytes_per_token = std::strtod(num.c_str(), &end);
        if (num.empty() || end != num.c_str() + num.size())
            throw ConfigError(fmt::format("counter '{}': bad bytes-per-token number", spec));
        c.validate();
        return c;
    }
    throw ConfigError(fmt::format("counter '{}': expected 'byte:<bytes-per-token>' or 'precomputed'", spec));
}

std::string TokenCounter::to_string() const {
    return mode == Mode::Precomputed ? "precomputed" : fmt::format("byte:{}", bytes_per_token);
}

std::uint64_t count_tokens(const Conversation& conv, const TokenCounter& counter) {
    if (counter.mode == TokenCounter::Mode::Precomputed) {
        if (!conv.token_count)
            throw InputError(fmt::format("conversation '{}' has no precomputed token_count", conv.id));
        return *conv.token_count;
    }
    std::uint64_t bytes = 0;
    for (const auto& m : conv.messages) bytes += m.content.size();
    // quotients within 1e-9 of an integer count as that integer
    const double q = static_cast<double>(bytes) / counter.bytes_per_token;
    const auto content = static_cast<std::uint64_t>(std::ceil(q - 1e-9));
    return content + kMessageOverheadTokens * conv.messages.size();
}

nlohmann::ordered_json PackedBatch::to_json() const {
    nlohmann::ordered_json j;
    j["capacity"] = capacity;
    j["used"] = used;
    auto& arr = j["items"] = nlohmann::ordered_json::array();
    for (const auto& it : items) {
        nlohmann::ordered_json o;
        o["id"] = it.id;
        o["tokens"] = it.tokens;
        arr.push_back(std::move(o));
    }
    return j;
}

namespace {

// Max-tree over the residual capacity of every batch slot, so the first
// batch with room for `need` is found in O(log n).
class ResidualTree {
public:
    ResidualTree(std::size_t n, std::uint64_t capacity) {
        size_ = 1;
        while (size_ < n) size_ <<= 1;
        tree_.assign(2 * size_, 0);
        for (std::size_t i = 0; i < n; ++i) tree_[size_ + i] = capacity;
        for (std::size_t i = size_ - 1; i >= 1; --i) tree_[i] = std::max(tree_[2 * i], tree_[2 * i + 1]);
    }

    std::size_t first_fit(std::uint64_t need) const {
        std::size_t node = 1;
        while (node < size_) node = tree_[2 * node] >= need ? 2 * node : 2 * node + 1;
        return node - size_;
    }

    void consume(std::size_t slot, std::uint64_t amount) {
        std::size_t node = size_ + slot;
        tree_[node] -= amount;
        for (node /= 2; node >= 1; node /= 2) tree_[node] = std::max(tree_[2 * node], tree_[2 * node + 1]);
    }

private:
    std::size_t size_ = 1;
    std::vector<std::uint64_t> tree_;
};

}  // namespace

std::vector<PackedBatch> pack_ffd(std::vector<PackItem> samples, std::uint64_t capacity) {
    if (capacity == 0) throw InputError("pack capacity must be positive");
    for (const auto& s : samples) {
        if (s.tokens > capacity)
            throw InputError(fmt::format("sample '{}' has {} tokens, more than the capacity {}", s.id, s.tokens, capacity));
    }
    std::sort(samples.begin(), samples.end(), [](const PackItem& a, const PackItem& b) {
        return a.tokens != b.tokens ? a.tokens > b.tokens : a.id < b.id;
    });

    std::vector<PackedBatch> batches;
    if (samples.empty()) return batches;
    ResidualTree tree(samples.size(), capacity);
    for (auto& s : samples) {
        const std::size_t slot = tree.first_fit(s.tokens);
        if (slot == batches.size()) batches.push_back(PackedBatch{capacity, {}, 0});
        tree.consume(slot, s.tokens);
        batches[slot].used += s.tokens;
        batches[slot].items.push_back(std::move(s));
    }
    return batches;
}

nlohmann::ordered_json PackReport::to_json() const {
    nlohmann::ordered_json j;
    j["batch_count"] = batch_count;
    j["sample_count"] = sample_count;
    j["total_tokens"] = total_tokens;
    j["mean_utilization"] = mean_utilization ? nlohmann::ordered_json(*mean_utilization) : nlohmann::ordered_json();
    j["min_utilization"] = min_utilization ? nlohmann::ordered_json(*min_utilization) : nlohmann::ordered_json();
    j["histogram"] = histogram;
    return j;
}

PackReport pack_report(const std::vector<PackedBatch>& batches) {
    PackReport r;
    r.batch_count = batches.size();
    if (batches.empty()) return r;
    r.histogram.assign(10, 0);
    double sum = 0.0, min = 1.0;
    for (const auto& b : batches) {
        const double u = static_cast<double>(b.used) / static_cast<double>(b.capacity);
        sum += u;
        min = std::min(min, u);
        r.sample_count += b.items.size();
        r.total_tokens += b.used;
        ++r.histogram[std::min<std::size_t>(9, static_cast<std::size_t>(u * 10.0))];
    }
    r.mean_utilization = sum / static_cast<double>(batches.size());
    r.min_utilization = min;
    return r;
}

}  // namespace luthier
