// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "luthier/tensor_archive.hpp"

namespace luthier {

enum class MergeMethod { Linear, Slerp };
enum class MismatchPolicy { Error, TakeFineTuned };

std::string_view method_name(MergeMethod m) noexcept;
std::optional<MergeMethod> parse_method(std::string_view s) noexcept;
std::string_view policy_name(MismatchPolicy p) noexcept;
std::optional<MismatchPolicy> parse_policy(std::string_view s) noexcept;

/// Shell-style glob (`*`, `?`, `[...]`), matched against the full tensor name.
bool glob_match(std::string_view pattern, std::string_view name);
bool glob_is_valid(std::string_view pattern);

struct MergeOverride {
    std::string pattern;
    MergeMethod method = MergeMethod::Linear;
    double alpha = 0.0;
};

struct MergeSpec {
    MergeMethod method = MergeMethod::Slerp;
    /// Share of the fine-tuned model; 1 - alpha goes to the base.
    double alpha = 0.5;
    std::vector<MergeOverride> overrides;
    MismatchPolicy mismatch_policy = MismatchPolicy::Error;
    double parallel_fallback_epsilon = 1e-6;

    /// Throws ConfigError on an out-of-range alpha, non-positive epsilon or bad glob.
    void validate() const;
    /// First matching override wins, else the global method and alpha.
    std::pair<MergeMethod, double> resolve(std::string_view tensor_name) const;
};

/// Elementwise (1 - alpha) * w0 + alpha * w1, evaluated in double and rounded once.
std::vector<float> lerp(std::span<const float> w0, std::span<const float> w1, double alpha,
                        std::string_view tensor_name = {});

struct SlerpResult {
    std::vector<float> values;
    double theta = 0.0;
    bool fallback = false;
};

/**
 * Spherical interpolation of two flattened tensors.
 *
 * The angle comes from the normalized vectors (dot product accumulated in
 * double, clamped to [-1, 1]); the arc weights are applied to the raw
 * buffers. When sin(theta) < epsilon, or either vector has zero norm, the
 * result is `lerp` and `fallback` is set. A zero-norm input reports theta = 0.
 */
SlerpResult slerp(std::span<const float> w0, std::span<const float> w1, double alpha, double epsilon,
                  std::string_view tensor_name = {});

struct TensorMergeRecord {
    std::string name;
    MergeMethod method = MergeMethod::Linear;
    double alpha = 0.0;
    std::optional<double> theta;  // set iff method == Slerp
    bool fallback = false;
    double max_abs_delta_from_base = 0.0;
    std::optional<std::string> copied_from;  // "base" / "fine_tuned" for unshared tensors
};

struct MergeReport {
    std::vector<TensorMergeRecord> tensors;

    /// One JSON object per tensor, newline terminated.
    std::string to_jsonl() const;
};

/**
 * Merges two archives tensor by tensor into `out`. Inputs are widened to f32
 * and combined in double; each result is narrowed back to the base tensor's
 * dtype. Output keeps the base ordering and metadata. `jobs` bounds the number
 * of tensors merged concurrently; output bytes do not depend on it.
 */
MergeReport merge_archives(const TensorArchive& base, const TensorArchive& fine_tuned, const MergeSpec& spec,
                           const std::filesystem::path& out, unsigned jobs = 1);

}  // namespace luthier
