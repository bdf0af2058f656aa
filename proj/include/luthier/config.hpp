// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "luthier/curate.hpp"
#include "luthier/gateway.hpp"
#include "luthier/merge.hpp"
#include "luthier/pack.hpp"
#include "luthier/scholar.hpp"

namespace luthier {

struct MergeJob {
    std::optional<std::filesystem::path> base;
    std::optional<std::filesystem::path> fine_tuned;
    std::optional<std::filesystem::path> output;
    std::optional<std::filesystem::path> report;
    MergeSpec spec;
};

struct LangidSettings {
    double min_confidence = langid::kDefaultMinConfidence;
};

struct PackSettings {
    std::size_t capacity = kDefaultPackCapacity;
    TokenCounter counter;
};

struct Config {
    MergeJob merge;
    GatewayConfig gateway;
    curate::CurateConfig curate;
    scholar::ScholarConfig scholar;
    LangidSettings langid;
    PackSettings pack;
    /// Top-level sections present in the document.
    std::set<std::string> sections;

    /// Validates every module section except the gateway's base URL, which may
    /// still arrive from the environment.
    void validate() const;
};

/**
 * Parses a TOML document with sections [merge] (plus [[merge.overrides]]),
 * [gateway], [curate], [langid], [scholar] and [pack]. Unknown sections and
 * keys are errors, with a spelling suggestion when one is close. Relative
 * paths resolve against `base_dir`. Throws ConfigError.
 */
Config parse_config(std::string_view document, std::string_view source_name = "<config>",
                    const std::filesystem::path& base_dir = {});

/// Reads and parses `path`; relative paths inside resolve against its directory.
Config load_config(const std::filesystem::path& path);

/// Closest candidate by edit distance, if within a third of the key's length (at least 2).
std::optional<std::string> suggest_key(std::string_view key, const std::set<std::string>& candidates);

}  // namespace luthier
