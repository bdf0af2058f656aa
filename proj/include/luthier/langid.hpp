// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace luthier::langid {

inline constexpr std::size_t kProfileSize = 1000;
inline constexpr std::size_t kMinCorpusChars = 10'000;
inline constexpr std::size_t kMinTextChars = 20;
inline constexpr double kDefaultMinConfidence = 0.25;
inline constexpr char kBoundary = '_';

/// Case-folded letters only; every non-letter run becomes one space.
std::string normalize(std::string_view text);

/// Character trigrams of the normalized text, each word wrapped in `_`.
std::vector<std::string> trigrams(std::string_view text);

/// Trigrams ranked by descending count, ties broken by byte order.
std::vector<std::pair<std::string, std::size_t>> ranked_trigrams(std::string_view text, std::size_t limit);

class LanguageProfile {
public:
    LanguageProfile() = default;
    LanguageProfile(std::string language, std::vector<std::string> ranked);

    const std::string& language() const noexcept { return language_; }
    std::size_t size() const noexcept { return ranked_.size(); }
    /// 1-based rank, or 0 when absent.
    std::size_t rank_of(std::string_view trigram) const;
    const std::vector<std::string>& ranked() const noexcept { return ranked_; }

    /// `trigram<TAB>rank` lines in rank order.
    std::string serialize() const;
    static LanguageProfile parse(std::string language, std::string_view text);

    bool operator==(const LanguageProfile& o) const { return language_ == o.language_ && ranked_ == o.ranked_; }

private:
    std::string language_;
    std::vector<std::string> ranked_;
    std::unordered_map<std::string, std::size_t> rank_;
};

/// Throws InputError when the corpus has fewer than kMinCorpusChars characters.
LanguageProfile build_profile(std::string_view corpus, std::string language);

struct LanguageVerdict {
    std::string language;  // ISO 639-1 code or "und"
    double confidence = 0.0;
    bool operator==(const LanguageVerdict&) const = default;
};

/// Out-of-place distance of the text's trigram ranking from a profile.
std::size_t distance(const std::vector<std::pair<std::string, std::size_t>>& doc, const LanguageProfile& profile);

/**
 * Nearest profile by out-of-place rank distance. Confidence is the margin
 * between the best and runner-up distances divided by the largest margin the
 * document's trigrams could produce (every trigram favouring the winner). It
 * is a separation score, not a probability. With a single profile it is
 * 1 - distance / (doc size x profile size). Returns "und" for texts under kMinTextChars after
 * normalization or when confidence falls below `min_confidence`.
 */
LanguageVerdict detect(std::string_view text, std::span<const LanguageProfile> profiles,
                       double min_confidence = kDefaultMinConfidence);

/// Built-in French and English profiles, sorted by language code.
const std::vector<LanguageProfile>& builtin_profiles();

}  // namespace luthier::langid
