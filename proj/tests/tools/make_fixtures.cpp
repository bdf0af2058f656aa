// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

// Regenerates the replay caches and golden outputs of the curate and scholar
// fixtures by running the CLI against the mock model over loopback HTTP.
// Usage: make_fixtures <tests/fixtures dir>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "luthier/cli.hpp"
#include "mock_llm.hpp"
#include "mock_server.hpp"
#include "temp_dir.hpp"

namespace fs = std::filesystem;
using namespace luthier::testing;

namespace {

int record(const fs::path& dir, const std::string& command, std::vector<std::string> args) {
    fs::remove_all(dir / "cache");
    fs::create_directories(dir / "golden");
    TempDir tmp;
    args.insert(args.begin(), {"luthier", command, "--config", (dir / (command + ".toml")).string(), "--cache-mode", "record",
                               "--manifest", (tmp / "manifest.json").string()});
    const int rc = luthier::cli::run(args, std::cout, std::cerr);
    std::cout << command << " exited " << rc << "\n";
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <fixtures dir>\n";
        return 1;
    }
    const fs::path root = argv[1];
    auto llm = std::make_shared<MockLlm>();
    const auto table = nlohmann::json::parse(read_file(root / "curate" / "translations.json"));
    for (const auto& [en, fr] : table.items()) llm->translations[en] = fr.get<std::string>();
    MockServer server(llm);
    ::setenv("LUTHIER_BASE_URL", server.base_url().c_str(), 1);

    const fs::path curate = root / "curate";
    int rc = record(curate, "curate",
                    {"--in", (curate / "input.jsonl").string(), "--out", (curate / "golden" / "output.jsonl").string(),
                     "--quarantine", (curate / "golden" / "quarantine.jsonl").string(), "--stats",
                     (curate / "golden" / "stats.json").string()});

    const fs::path scholar = root / "scholar";
    rc |= record(scholar, "scholar",
                 {"--in", (scholar / "docs").string(), "--out", (scholar / "golden" / "items.jsonl").string(),
                  "--rejects", (scholar / "golden" / "rejects.jsonl").string(), "--stats",
                  (scholar / "golden" / "stats.json").string()});
    std::cout << "model calls: " << llm->calls() << "\n";
    return rc;
}
