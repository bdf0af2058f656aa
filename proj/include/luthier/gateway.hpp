// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "luthier/error.hpp"

namespace luthier {

enum class Role { System, User, Assistant };

std::string_view role_name(Role role) noexcept;
std::optional<Role> parse_role(std::string_view s) noexcept;

struct ChatMessage {
    Role role = Role::User;
    std::string content;
    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 2048;

    /// Throws InputError if the request breaks the message-shape rules.
    void validate() const;
    /// Wire body with fixed field order: model, messages, temperature, max_tokens.
    std::string body() const;
};

enum class CacheMode { Off, Record, Replay };

std::optional<CacheMode> parse_cache_mode(std::string_view s) noexcept;

struct GatewayConfig {
    std::string base_url;
    std::string api_key;  // only ever populated from the environment
    unsigned max_concurrent = 8;
    int retry_max = 5;
    int backoff_base_ms = 500;
    int timeout_s = 120;
    CacheMode cache_mode = CacheMode::Off;
    std::filesystem::path cache_dir;

    void validate() const;
    /// Fills base_url and api_key from LUTHIER_BASE_URL / LUTHIER_API_KEY when set.
    void apply_environment();
};

/// Anything that turns a chat request into the assistant's reply text.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

/**
 * OpenAI-style `POST {base_url}/chat/completions` client.
 *
 * Safe for concurrent use; at most `max_concurrent` requests are in flight.
 * HTTP 429, 5xx, timeouts and connection failures are retried up to
 * `retry_max` times with exponential backoff plus jitter, the first wait
 * being at least `backoff_base_ms`.
 */
class HttpGateway final : public ChatBackend {
public:
    explicit HttpGateway(GatewayConfig config);
    ~HttpGateway() override;

    std::string complete(const ChatRequest& request) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Record/replay cache in front of another backend, keyed by SHA-256 of the
/// request body. Replay mode never calls upstream; a miss is a GatewayError.
class CachingGateway final : public ChatBackend {
public:
    CachingGateway(std::filesystem::path dir, CacheMode mode, std::shared_ptr<ChatBackend> upstream);

    std::string complete(const ChatRequest& request) override;

    static std::string key(const ChatRequest& request);

private:
    std::filesystem::path dir_;
    CacheMode mode_;
    std::shared_ptr<ChatBackend> upstream_;
};

/// HttpGateway, wrapped in a CachingGateway unless cache_mode is Off.
std::shared_ptr<ChatBackend> make_gateway(const GatewayConfig& config);

/// One-shot convenience around HttpGateway.
std::string complete(const GatewayConfig& config, const ChatRequest& request);

/// Content of the first choice in a chat-completion response body.
std::string extract_content(std::string_view response_body);

class VerdictError : public InputError {
public:
    explicit VerdictError(std::string raw);
    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

struct JudgeVerdict {
    bool keep = false;
    std::string raw;
};

/// Accepts exactly "true"/"false" after trimming and case folding.
JudgeVerdict parse_verdict(std::string_view raw);

}  // namespace luthier
