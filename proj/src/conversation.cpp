// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include "luthier/conversation.hpp"

#include <algorithm>

#include <fmt/core.h>

#include "luthier/error.hpp"
#include "luthier/hash.hpp"

namespace luthier {

bool Conversation::roles_alternate() const {
    std::size_t i = 0;
    if (!messages.empty() && messages[0].role == Role::System) i = 1;
    for (std::size_t k = 0; i < messages.size(); ++i, ++k) {
        const Role expected = k % 2 == 0 ? Role::User : Role::Assistant;
        if (messages[i].role != expected) return false;
    }
    return true;
}

void Conversation::stamp(std::string_view stage) {
    if (std::find(provenance.begin(), provenance.end(), stage) == provenance.end())
        provenance.emplace_back(stage);
}

std::string Conversation::content_id() const {
    nlohmann::ordered_json j;
    j["source"] = source;
    auto& msgs = j["messages"] = nlohmann::ordered_json::array();
    for (const auto& m : messages) msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    return sha256_hex(j.dump()).substr(0, 16);
}

nlohmann::ordered_json Conversation::to_json() const {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["source"] = source;
    auto& msgs = j["messages"] = nlohmann::ordered_json::array();
    for (const auto& m : messages) {
        nlohmann::ordered_json o;
        o["role"] = role_name(m.role);
        o["content"] = m.content;
        msgs.push_back(std::move(o));
    }
    if (subject) j["subject"] = *subject;
    if (language) j["language"] = *language;
    if (token_count) j["token_count"] = *token_count;
    if (!provenance.empty()) j["provenance"] = provenance;
    return j;
}

Conversation Conversation::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("line is not a JSON object");
    Conversation c;
    if (!j.contains("messages")) throw InputError("missing \"messages\"");
    if (!j.contains("source") || !j["source"].is_string()) throw InputError("missing string \"source\"");
    c.source = j["source"].get<std::string>();
    if (j.contains("id")) {
        if (!j["id"].is_string() || j["id"].get<std::string>().empty())
            throw InputError("\"id\" must be a non-empty string");
        c.id = j["id"].get<std::string>();
    }
    const auto& msgs = j["messages"];
    if (!msgs.is_array() || msgs.empty()) throw InputError("\"messages\" must be a non-empty list");
    for (const auto& m : msgs) {
        if (!m.is_object() || !m.contains("role") || !m["role"].is_string() || !m.contains("content") ||
            !m["content"].is_string())
            throw InputError("each message needs string \"role\" and \"content\"");
        auto role = parse_role(m["role"].get<std::string>());
        if (!role) throw InputError(fmt::format("unknown role \"{}\"", m["role"].get<std::string>()));
        c.messages.push_back({*role, m["content"].get<std::string>()});
    }
    if (!c.roles_alternate()) throw InputError("roles must alternate user/assistant after an optional system message");
    if (j.contains("subject") && !j["subject"].is_null()) {
        if (!j["subject"].is_string()) throw InputError("\"subject\" must be a string");
        c.subject = j["subject"].get<std::string>();
    }
    if (j.contains("language") && j["language"].is_string()) c.language = j["language"].get<std::string>();
    if (j.contains("token_count") && j["token_count"].is_number_unsigned())
        c.token_count = j["token_count"].get<std::uint64_t>();
    if (j.contains("provenance") && j["provenance"].is_array()) {
        for (const auto& p : j["provenance"])
            if (p.is_string()) c.provenance.push_back(p.get<std::string>());
    }
    if (c.id.empty()) c.id = c.content_id();
    return c;
}

}  // namespace luthier
