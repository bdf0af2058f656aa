// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "luthier/conversation.hpp"
#include "luthier/curate.hpp"
#include "luthier/gateway.hpp"
#include "luthier/langid.hpp"

namespace luthier::scholar {

inline constexpr std::size_t kDefaultMinCharsPerPage = 200;
inline constexpr std::size_t kMinResponseChars = 40;
inline constexpr int kMinYear = 1980;
inline constexpr int kMaxYear = 2025;

/// Subject taxonomy; anything else is rejected at load time.
const std::vector<std::string>& subjects();
bool is_subject(std::string_view s);

enum class DocKind { SubjectSheet, SolutionSheet };
std::string_view kind_name(DocKind k) noexcept;
std::optional<DocKind> parse_kind(std::string_view s) noexcept;

struct ExamDoc {
    std::string doc_id;
    std::vector<std::string> pages;
    std::string subject;
    int year = 0;
    DocKind kind = DocKind::SubjectSheet;
    /// Pairs a subject sheet with its solution sheet.
    std::string exam;

    /// Throws InputError on empty pages, unknown subject or out-of-range year.
    void validate() const;
    /// Pages joined with newlines; segment offsets refer to this string.
    std::string text() const;
};

/// Reads `{doc_id}.pages.jsonl` (one JSON string per line) and
/// `{doc_id}.meta.json` ({subject, year, kind, exam?}) pairs, sorted by doc_id.
/// Without "exam", the doc_id minus a `-sujet`/`-corrige` suffix is used.
std::vector<ExamDoc> load_exam_dir(const std::filesystem::path& dir);

enum class Screen { Usable, Scanned };

/// Scanned iff the mean number of non-whitespace code points per page is
/// strictly below `min_chars_per_page`.
Screen screen_scanned(const ExamDoc& doc, std::size_t min_chars_per_page = kDefaultMinCharsPerPage);

struct MarkerRule {
    int level = 0;
    std::string prefix;  // prepended to the label in qualified keys; may be empty
    std::string pattern;
};

/// Parses the marker table format (see assets/scholar/markers.txt).
std::vector<MarkerRule> parse_marker_rules(std::string_view table);
/// The shipped marker table.
const std::vector<MarkerRule>& builtin_marker_rules();

struct Segment {
    std::string marker;  // marker text as written, e.g. "Exercice 2", "1."
    std::string label;   // capture group, lower-cased: "2", "a", "ii"
    std::string key;     // qualified, normalized: "exercice 2/partie a/1"
    int level = 0;
    std::size_t begin = 0;  // [begin, end) byte span in ExamDoc::text()
    std::size_t end = 0;
    std::string text;  // span text after the marker, trimmed
    bool leaf = true;  // no deeper marker follows before the next sibling
};

struct Segmentation {
    std::vector<Segment> segments;
    bool unsegmented = false;  // no marker found; one segment covers the whole text
};

Segmentation segment_questions(std::string_view text, std::span<const MarkerRule> rules);
Segmentation segment_questions(const ExamDoc& doc);

struct QAItem {
    std::string doc_id;
    std::string subject;
    std::string marker;  // qualified segment key
    std::string question;
    std::string context;
    std::string response;
    std::set<std::string> flags;

    /// User turn: context, blank line, question (question alone without context).
    std::string user_turn() const;
    Conversation to_conversation() const;
    /// Output record; "flags" is written only when non-empty.
    nlohmann::ordered_json to_json() const;
};

struct ScholarConfig {
    std::string extract_model = "gpt-4o";
    std::string refine_model = "gpt-4o";
    double temperature = 0.0;
    int max_tokens = 4096;
    std::size_t min_chars_per_page = kDefaultMinCharsPerPage;
    std::size_t min_response_chars = kMinResponseChars;
    double min_confidence = langid::kDefaultMinConfidence;
    unsigned jobs = 8;

    void validate() const;
};

/// Reply could not be used; the document or item goes to quarantine.
class QuarantineError : public InputError {
public:
    using InputError::InputError;
};

/// Builds the context-extraction request for a document and its questions.
ChatRequest extraction_request(const ExamDoc& doc, const std::vector<std::string>& questions,
                               const ScholarConfig& config);

/**
 * Asks for each question's introductory context and aligns the reply by exact
 * question text. Unmatched questions take the unused entry at their own index
 * and are flagged "alignment-fuzzy"; a reply with a different entry count
 * flags every item "count-mismatch". Throws QuarantineError when the reply is
 * not a JSON list.
 */
std::vector<QAItem> extract_contexts(const ExamDoc& doc, const std::vector<Segment>& questions,
                                     ChatBackend& gateway, const ScholarConfig& config);

ChatRequest refine_request(const QAItem& item, const ScholarConfig& config);

/// Rewrites question, context and response from the reply's JSON object
/// {question, context, reponse}; flags "not-french" and "latex-unbalanced".
/// Throws QuarantineError on a malformed reply.
QAItem refine(QAItem item, ChatBackend& gateway, const ScholarConfig& config,
              std::span<const langid::LanguageProfile> profiles);

struct Rejection {
    QAItem item;
    std::vector<std::string> reasons;
    nlohmann::ordered_json to_json() const;
};

struct FilterResult {
    std::vector<QAItem> kept;
    std::vector<Rejection> rejected;
};

/// Exercise labels ("1", "ii", ...) present in each source document.
using ExerciseIndex = std::map<std::string, std::set<std::string>>;

/// Reasons: "flag:<tag>" per flag, "missing-data", "response-too-short",
/// "marker-contradiction" (an "Exercice N" reference absent from the source).
FilterResult final_filter(std::vector<QAItem> items, const ExerciseIndex& exercises,
                          std::size_t min_response_chars = kMinResponseChars);

/// Checks a record against the output schema; returns the problems found.
std::vector<std::string> validate_record(const nlohmann::json& record);

struct DocQuarantine {
    std::string doc_id;
    std::string stage;
    std::string reason;
    std::string detail;
    bool infrastructure = false;
    std::optional<QAItem> item;
    nlohmann::ordered_json to_json() const;
};

struct ScholarResult {
    std::vector<QAItem> items;
    std::vector<Rejection> rejected;
    std::vector<DocQuarantine> quarantined;
    std::vector<std::string> scanned;  // doc ids
    std::vector<curate::StageStats> stages;
    curate::CorpusStats stats;

    bool infrastructure_failure() const;
};

/// Screens, segments, extracts, refines and filters every exam. Exams run
/// concurrently; calls within one exam are sequential. Output order follows
/// exam key, then segment order.
ScholarResult run_scholar(const std::vector<ExamDoc>& docs, ChatBackend& gateway, const ScholarConfig& config,
                          std::span<const langid::LanguageProfile> profiles);

/// Substitutes `{name}` placeholders in one pass; unknown names stay verbatim.
std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

}  // namespace luthier::scholar
