// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "luthier/gateway.hpp"

namespace luthier {

struct Conversation {
    std::string id;
    std::string source;
    std::vector<ChatMessage> messages;
    std::optional<std::string> subject;
    std::optional<std::string> language;
    std::optional<std::uint64_t> token_count;
    std::vector<std::string> provenance;

    /// Roles alternate user/assistant starting with user, after an optional
    /// leading system message.
    bool roles_alternate() const;

    /// Appends a stage stamp unless it is already present.
    void stamp(std::string_view stage);

    /// Content hash over source and messages; stable across runs.
    std::string content_id() const;

    nlohmann::ordered_json to_json() const;
    /// Throws InputError with a reason on schema violations.
    static Conversation from_json(const nlohmann::json& j);
};

}  // namespace luthier
