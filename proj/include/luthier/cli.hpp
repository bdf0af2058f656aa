// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace luthier::cli {

/// Exit codes: 0 success, 1 input or validation error, 2 gateway or
/// infrastructure failure.
enum ExitCode : int { kOk = 0, kInputError = 1, kInfrastructure = 2 };

/**
 * Runs one command line (args[0] is the program name). Human-readable
 * progress goes to `out`; JSON-lines logs and error records go to `err`.
 * Every run except --help/--version leaves one manifest.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

/// Resolves a dotted path with [n] indices, e.g. "messages[0].content".
/// Returns nullptr when the path does not exist.
const nlohmann::json* lookup_field(const nlohmann::json& doc, std::string_view path);

}  // namespace luthier::cli
