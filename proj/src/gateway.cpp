// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "luthier/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <semaphore>
#include <sstream>
#include <thread>

#include <fmt/core.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "luthier/hash.hpp"
#include "luthier/text.hpp"

namespace luthier {

std::string_view role_name(Role role) noexcept {
    switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    }
    return "user";
}

std::optional<Role> parse_role(std::string_view s) noexcept {
    if (s == "system") return Role::System;
    if (s == "user") return Role::User;
    if (s == "assistant") return Role::Assistant;
    return std::nullopt;
}

void ChatRequest::validate() const {
    if (model.empty()) throw InputError("chat request: model is empty");
    if (messages.empty()) throw InputError("chat request: no messages");
    bool has_user = false;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        const auto& m = messages[i];
        if (m.role == Role::System && i != 0)
            throw InputError("chat request: a system message may only come first");
        if (m.content.empty())
            throw InputError(fmt::format("chat request: message {} has empty content", i));
        has_user = has_user || m.role == Role::User;
    }
    if (!has_user) throw InputError("chat request: needs at least one user message");
    if (!(temperature >= 0.0)) throw InputError("chat request: temperature must be >= 0");
    if (max_tokens <= 0) throw InputError("chat request: max_tokens must be positive");
}

std::string ChatRequest::body() const {
    nlohmann::ordered_json j;
    j["model"] = model;
    auto& msgs = j["messages"] = nlohmann::ordered_json::array();
    for (const auto& m : messages) {
        nlohmann::ordered_json o;
        o["role"] = role_name(m.role);
        o["content"] = m.content;
        msgs.push_back(std::move(o));
    }
    j["temperature"] = temperature;
    j["max_tokens"] = max_tokens;
    return j.dump();
}

std::optional<CacheMode> parse_cache_mode(std::string_view s) noexcept {
    if (s == "off") return CacheMode::Off;
    if (s == "record") return CacheMode::Record;
    if (s == "replay") return CacheMode::Replay;
    return std::nullopt;
}

void GatewayConfig::validate() const {
    if (max_concurrent == 0) throw ConfigError("gateway.max_concurrent must be positive");
    if (retry_max < 0) throw ConfigError("gateway.retry_max must be >= 0");
    if (backoff_base_ms <= 0) throw ConfigError("gateway.backoff_base_ms must be positive");
    if (timeout_s <= 0) throw ConfigError("gateway.timeout_s must be positive");
    if (cache_mode != CacheMode::Off && cache_dir.empty())
        throw ConfigError("gateway.cache_dir is required when cache_mode is record or replay");
    if (cache_mode != CacheMode::Replay && base_url.empty())
        throw ConfigError("gateway base URL missing: set LUTHIER_BASE_URL or gateway.base_url");
}

void GatewayConfig::apply_environment() {
    if (const char* url = std::getenv("LUTHIER_BASE_URL"); url && *url) base_url = url;
    if (const char* key = std::getenv("LUTHIER_API_KEY"); key && *key) api_key = key;
}

std::string extract_content(std::string_view response_body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(response_body);
    } catch (const nlohmann::json::exception& e) {
        throw GatewayError(GatewayError::Kind::Malformed, fmt::format("malformed response: {}", e.what()));
    }
    if (!j.is_object() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
        throw GatewayError(GatewayError::Kind::Malformed, "malformed response: missing \"choices\"");
    const auto& first = j["choices"][0];
    if (!first.is_object() || !first.contains("message") || !first["message"].is_object())
        throw GatewayError(GatewayError::Kind::Malformed, "malformed response: missing \"message\"");
    const auto& msg = first["message"];
    if (!msg.contains("content") || !msg["content"].is_string())
        throw GatewayError(GatewayError::Kind::Malformed, "malformed response: missing message \"content\"");
    return msg["content"].get<std::string>();
}

struct HttpGateway::Impl {
    GatewayConfig config;
    std::string scheme_host_port;
    std::string path;
    std::counting_semaphore<> slots;
    std::mutex rng_mu;
    std::mt19937_64 rng{std::random_device{}()};

    explicit Impl(GatewayConfig c)
        : config(std::move(c)), slots(static_cast<std::ptrdiff_t>(config.max_concurrent)) {
        std::string url = config.base_url;
        while (!url.empty() && url.back() == '/') url.pop_back();
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) throw ConfigError(fmt::format("base URL '{}' has no scheme", url));
        const auto path_start = url.find('/', scheme_end + 3);
        scheme_host_port = url.substr(0, path_start);
        path = (path_start == std::string::npos ? std::string() : url.substr(path_start)) + "/chat/completions";
    }

    std::chrono::milliseconds backoff(int attempt) {
        std::lock_guard lock(rng_mu);
        const auto base = static_cast<std::int64_t>(config.backoff_base_ms);
        std::uniform_int_distribution<std::int64_t> jitter(0, base / 2);
        return std::chrono::milliseconds(base * (std::int64_t{1} << std::min(attempt, 16)) + jitter(rng));
    }
};

HttpGateway::HttpGateway(GatewayConfig config) {
    config.validate();
    impl_ = std::make_unique<Impl>(std::move(config));
}

HttpGateway::~HttpGateway() = default;

std::string HttpGateway::complete(const ChatRequest& request) {
    request.validate();
    const std::string body = request.body();
    const auto& cfg = impl_->config;

    std::string last_error;
    for (int attempt = 0; attempt <= cfg.retry_max; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(impl_->backoff(attempt - 1));

        httplib::Result res;
        {
            impl_->slots.acquire();
            struct Release {
                std::counting_semaphore<>& s;
                ~Release() { s.release(); }
            } release{impl_->slots};

            httplib::Client client(impl_->scheme_host_port);
            client.set_connection_timeout(cfg.timeout_s, 0);
            client.set_read_timeout(cfg.timeout_s, 0);
            client.set_write_timeout(cfg.timeout_s, 0);
            httplib::Headers headers;
            if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);
            res = client.Post(impl_->path, headers, body, "application/json");
        }

        if (!res) {
            last_error = fmt::format("transport error: {}", httplib::to_string(res.error()));
            continue;
        }
        const int status = res->status;
        if (status == 429 || status >= 500) {
            last_error = fmt::format("HTTP {}", status);
            continue;
        }
        if (status < 200 || status >= 300)
            throw GatewayError(GatewayError::Kind::Http,
                               fmt::format("HTTP {} from {}: {}", status, impl_->path, res->body.substr(0, 200)),
                               status);
        return extract_content(res->body);
    }
    throw GatewayError(GatewayError::Kind::Exhausted,
                       fmt::format("gave up after {} attempts: {}", cfg.retry_max + 1, last_error));
}

CachingGateway::CachingGateway(std::filesystem::path dir, CacheMode mode, std::shared_ptr<ChatBackend> upstream)
    : dir_(std::move(dir)), mode_(mode), upstream_(std::move(upstream)) {
    if (mode_ != CacheMode::Replay && !upstream_)
        throw ConfigError("record mode needs an upstream gateway");
}

std::string CachingGateway::key(const ChatRequest& request) {
    return sha256_hex(request.body());
}

std::string CachingGateway::complete(const ChatRequest& request) {
    request.validate();
    if (mode_ == CacheMode::Off) return upstream_->complete(request);

    const std::string k = key(request);
    const auto file = dir_ / (k + ".json");
    if (std::ifstream in(file, std::ios::binary); in) {
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            return nlohmann::json::parse(ss.str()).at("response").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw GatewayError(GatewayError::Kind::Malformed,
                               fmt::format("corrupt cache entry {}: {}", file.string(), e.what()));
        }
    }
    if (mode_ == CacheMode::Replay)
        throw GatewayError(GatewayError::Kind::ReplayMiss, fmt::format("replay cache miss for request {}", k));

    std::string response = upstream_->complete(request);
    nlohmann::ordered_json entry;
    entry["request"] = nlohmann::ordered_json::parse(request.body());
    entry["response"] = response;

    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    auto tmp = file;
    tmp += fmt::format(".{}.tmp", std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << entry.dump(2) << '\n';
        if (!out) throw IoError(fmt::format("cannot write cache entry {}", tmp.string()));
    }
    std::filesystem::rename(tmp, file, ec);
    if (ec) throw IoError(fmt::format("cannot store cache entry {}: {}", file.string(), ec.message()));
    return response;
}

std::shared_ptr<ChatBackend> make_gateway(const GatewayConfig& config) {
    config.validate();
    if (config.cache_mode == CacheMode::Replay)
        return std::make_shared<CachingGateway>(config.cache_dir, CacheMode::Replay, nullptr);
    auto http = std::make_shared<HttpGateway>(config);
    if (config.cache_mode == CacheMode::Off) return http;
    return std::make_shared<CachingGateway>(config.cache_dir, config.cache_mode, std::move(http));
}

std::string complete(const GatewayConfig& config, const ChatRequest& request) {
    return HttpGateway(config).complete(request);
}

VerdictError::VerdictError(std::string raw)
    : InputError(fmt::format("unparseable verdict: \"{}\"", raw.substr(0, 120))), raw_(std::move(raw)) {}

JudgeVerdict parse_verdict(std::string_view raw) {
    const std::string norm = text::to_lower_ascii(text::trim(raw));
    if (norm == "true") return {true, std::string(raw)};
    if (norm == "false") return {false, std::string(raw)};
    throw VerdictError(std::string(raw));
}

}  // namespace luthier
