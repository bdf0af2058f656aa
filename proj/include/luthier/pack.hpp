// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "luthier/conversation.hpp"

namespace luthier {

inline constexpr std::uint64_t kDefaultPackCapacity = 16'384;
/// Role and chat-template markup charged per message by the byte heuristic.
inline constexpr std::uint64_t kMessageOverheadTokens = 8;

struct TokenCounter {
    enum class Mode { ByteHeuristic, Precomputed };
    Mode mode = Mode::ByteHeuristic;
    double bytes_per_token = 3.2;

    void validate() const;
    /// "byte:<bytes-per-token>" or "precomputed".
    static TokenCounter parse(std::string_view spec);
    std::string to_string() const;
};

/// ceil(content bytes / bytes_per_token) + 8 per message, or the stamped count.
std::uint64_t count_tokens(const Conversation& conv, const TokenCounter& counter);

struct PackItem {
    std::string id;
    std::uint64_t tokens = 0;
    bool operator==(const PackItem&) const = default;
};

struct PackedBatch {
    std::uint64_t capacity = kDefaultPackCapacity;
    std::vector<PackItem> items;
    std::uint64_t used = 0;

    nlohmann::ordered_json to_json() const;
};

/// First-fit decreasing; ties in token count are ordered by id. Samples are
/// never split. Throws InputError naming the first sample over capacity.
std::vector<PackedBatch> pack_ffd(std::vector<PackItem> samples, std::uint64_t capacity = kDefaultPackCapacity);

struct PackReport {
    std::size_t batch_count = 0;
    std::size_t sample_count = 0;
    std::uint64_t total_tokens = 0;
    std::optional<double> mean_utilization;
    std::optional<double> min_utilization;
    /// Ten utilization buckets: [0,0.1), ..., [0.9,1.0].
    std::vector<std::size_t> histogram;

    nlohmann::ordered_json to_json() const;
};

PackReport pack_report(const std::vector<PackedBatch>& batches);

}  // namespace luthier
