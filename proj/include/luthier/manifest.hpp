// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "luthier/curate.hpp"

namespace luthier {

struct InputDigest {
    std::string path;
    std::string sha256;  // empty when the file could not be read
};

/// Record of one CLI invocation, written once at the end of every run.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    std::string config_sha256;  // empty without a config file
    std::vector<InputDigest> inputs;
    std::vector<std::string> outputs;
    std::string version;
    std::string started_at;  // ISO 8601, UTC
    std::string finished_at;
    int exit_code = 0;
    std::optional<std::string> error;
    std::vector<curate::StageStats> stages;

    /// Hashes the file content; unreadable files get an empty digest.
    void add_input(const std::filesystem::path& path);

    nlohmann::ordered_json to_json() const;
    /// Writes to `path` via a temporary file and rename.
    void write(const std::filesystem::path& path) const;
};

/// Current UTC time as "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string utc_timestamp();

}  // namespace luthier
