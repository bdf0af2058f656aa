// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "luthier/conversation.hpp"
#include "luthier/gateway.hpp"
#include "luthier/langid.hpp"
#include "luthier/pack.hpp"

namespace luthier::curate {

/// Per-stage disposition counts. `breakdown` counts drop and quarantine reasons.
struct StageStats {
    std::string stage;
    std::size_t input_count = 0;
    std::size_t kept = 0;
    std::size_t dropped = 0;
    std::size_t quarantined = 0;
    std::map<std::string, std::size_t> breakdown;

    /// Throws std::logic_error unless kept + dropped + quarantined == input_count.
    void check() const;
    nlohmann::ordered_json to_json() const;
};

struct QuarantineRecord {
    Conversation conversation;  // as it entered the failing stage
    std::string stage;
    std::string reason;
    std::string detail;
    bool infrastructure = false;

    nlohmann::ordered_json to_json() const;
};

struct StageResult {
    std::vector<Conversation> kept;
    std::vector<std::size_t> kept_indices;  // positions in the stage input
    std::vector<QuarantineRecord> quarantined;
    StageStats stats;
};

struct IngestResult {
    std::vector<Conversation> conversations;
    std::vector<std::string> skipped;  // "file:line: reason"
    StageStats stats;
};

/// Reads JSONL files. Malformed lines are skipped and reported; a file with
/// more than 10% malformed lines is rejected with InputError.
IngestResult ingest(const std::vector<std::filesystem::path>& paths);

struct CurateConfig {
    std::string translate_model = "gpt-4o";
    std::string generate_model = "gpt-4o";
    std::string judge_model = "gpt-4o";
    double translate_temperature = 0.0;
    double generate_temperature = 0.7;
    double judge_temperature = 0.0;
    int max_tokens = 4096;
    int judge_max_tokens = 8;
    /// Sources whose English conversations are translated and regenerated.
    std::vector<std::string> translate_sources;
    double min_confidence = langid::kDefaultMinConfidence;
    unsigned jobs = 8;
    TokenCounter counter;

    void validate() const;
};

/// Keeps conversations whose user+assistant text is detected as French.
StageResult filter_french(std::vector<Conversation> in, std::span<const langid::LanguageProfile> profiles,
                          double min_confidence);

/// Replaces user (and system) turns with French translations and removes
/// assistant turns, which are regenerated later rather than translated.
StageResult translate_prompts(std::vector<Conversation> in, ChatBackend& gateway, const CurateConfig& config);

/// Generates an assistant turn after every user turn, each call conditioned
/// on all earlier turns including the answers generated so far.
StageResult generate_responses(std::vector<Conversation> in, ChatBackend& gateway, const CurateConfig& config);

enum class JudgeStage { Content, Linguistic };

std::string_view judge_stage_name(JudgeStage stage) noexcept;

/// LLM-as-judge screen. "True" keeps, "False" drops, anything else quarantines.
StageResult judge_filter(std::vector<Conversation> in, ChatBackend& gateway, JudgeStage stage,
                         const CurateConfig& config);

/// User text handed to the judge: every turn, labelled.
std::string judge_payload(const Conversation& conv);

/// Drops conversations whose case-folded, whitespace-collapsed user turns
/// match an earlier conversation's.
StageResult dedup(std::vector<Conversation> in);

struct Share {
    std::string label;
    std::size_t count = 0;
    std::uint32_t hundredths = 0;  // percentage x 100

    std::string percent() const;  // "67.23"
};

/// Percentages to two decimals summing to exactly 100.00 (largest remainder).
/// Leftover hundredths go to the largest remainders; ties favour the larger
/// count, then the label in byte order. Result is sorted by count descending.
std::vector<Share> largest_remainder(const std::map<std::string, std::size_t>& counts);

struct CorpusStats {
    std::size_t sample_count = 0;
    std::uint64_t token_total = 0;
    std::vector<Share> by_source;
    std::vector<Share> by_subject;

    nlohmann::ordered_json to_json() const;
};

/// Requires token_count on every conversation.
CorpusStats corpus_stats(const std::vector<Conversation>& corpus);

struct PipelineResult {
    std::vector<Conversation> output;
    std::vector<QuarantineRecord> quarantine;
    std::vector<StageStats> stages;
    CorpusStats stats;

    bool infrastructure_failure() const;
};

/**
 * language -> (translate -> generate, for English conversations from
 * `translate_sources`) -> linguistic judge -> content judge -> dedup, then
 * token counts and statistics. Output keeps input order.
 */
PipelineResult run_pipeline(std::vector<Conversation> input, ChatBackend& gateway, const CurateConfig& config,
                            std::span<const langid::LanguageProfile> profiles);

}  // namespace luthier::curate
