// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include "luthier/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <fmt/core.h>

#include "luthier/error.hpp"
#include "luthier/hash.hpp"

namespace luthier {

void RunManifest::add_input(const std::filesystem::path& path) {
    InputDigest d{path.string(), {}};
    try {
        if (std::filesystem::is_regular_file(path)) d.sha256 = sha256_file(path);
    } catch (const std::exception&) {
        d.sha256.clear();
    }
    inputs.push_back(std::move(d));
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["argv"] = argv;
    j["config_sha256"] = config_sha256.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(config_sha256);
    auto& in = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& d : inputs)
        in.push_back({{"path", d.path}, {"sha256", d.sha256.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(d.sha256)}});
    j["outputs"] = outputs;
    j["version"] = version;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["exit_code"] = exit_code;
    j["error"] = error ? nlohmann::ordered_json(*error) : nlohmann::ordered_json();
    auto& st = j["stages"] = nlohmann::ordered_json::array();
    for (const auto& s : stages) st.push_back(s.to_json());
    return j;
}

void RunManifest::write(const std::filesystem::path& path) const {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(fmt::format("cannot write manifest {}", tmp.string()));
        out << to_json().dump(2) << '\n';
        if (!out) throw IoError(fmt::format("cannot write manifest {}", tmp.string()));
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError(fmt::format("cannot move manifest into place at {}: {}", path.string(), ec.message()));
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    return fmt::format("{}.{:03}Z", buf, ms);
}

}  // namespace luthier
