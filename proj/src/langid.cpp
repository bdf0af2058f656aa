// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include "luthier/langid.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <map>

#include <fmt/core.h>

#include "luthier/assets.hpp"
#include "luthier/error.hpp"
#include "luthier/text.hpp"

namespace luthier::langid {

std::string normalize(std::string_view input) {
    std::string out;
    bool gap = false;
    for (char32_t cp : text::decode_utf8(input)) {
        if (!text::is_letter(cp)) {
            gap = !out.empty();
            continue;
        }
        if (gap) {
            out.push_back(' ');
            gap = false;
        }
        text::append_utf8(out, text::fold_case(cp));
    }
    return out;
}

std::vector<std::string> trigrams(std::string_view input) {
    std::vector<std::string> out;
    const std::u32string norm = text::decode_utf8(normalize(input));
    std::size_t start = 0;
    while (start < norm.size()) {
        std::size_t end = norm.find(U' ', start);
        if (end == std::u32string::npos) end = norm.size();
        std::u32string word;
        word.reserve(end - start + 2);
        word.push_back(U'_');
        word.append(norm, start, end - start);
        word.push_back(U'_');
        for (std::size_t i = 0; i + 3 <= word.size(); ++i) out.push_back(text::encode_utf8(word.substr(i, 3)));
        start = end + 1;
    }
    return out;
}

std::vector<std::pair<std::string, std::size_t>> ranked_trigrams(std::string_view input, std::size_t limit) {
    std::map<std::string, std::size_t> counts;
    for (auto& t : trigrams(input)) ++counts[std::move(t)];
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > limit) ranked.resize(limit);
    return ranked;
}

LanguageProfile::LanguageProfile(std::string language, std::vector<std::string> ranked)
    : language_(std::move(language)), ranked_(std::move(ranked)) {
    for (std::size_t i = 0; i < ranked_.size(); ++i) {
        if (!rank_.emplace(ranked_[i], i + 1).second)
            throw InputError(fmt::format("profile '{}': trigram '{}' listed twice", language_, ranked_[i]));
    }
}

std::size_t LanguageProfile::rank_of(std::string_view trigram) const {
    auto it = rank_.find(std::string(trigram));
    return it == rank_.end() ? 0 : it->second;
}

std::string LanguageProfile::serialize() const {
    std::string out;
    for (std::size_t i = 0; i < ranked_.size(); ++i) out += fmt::format("{}\t{}\n", ranked_[i], i + 1);
    return out;
}

LanguageProfile LanguageProfile::parse(std::string language, std::string_view body) {
    std::vector<std::pair<std::size_t, std::string>> rows;
    std::size_t line_no = 0;
    while (!body.empty()) {
        auto nl = body.find('\n');
        std::string_view line = body.substr(0, nl);
        body = nl == std::string_view::npos ? std::string_view{} : body.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        auto tab = line.find('\t');
        std::size_t rank = 0;
        if (tab == std::string_view::npos ||
            std::from_chars(line.data() + tab + 1, line.data() + line.size(), rank).ec != std::errc{} || rank == 0)
            throw InputError(fmt::format("profile '{}' line {}: expected trigram<TAB>rank", language, line_no));
        rows.emplace_back(rank, std::string(line.substr(0, tab)));
    }
    std::sort(rows.begin(), rows.end());
    std::vector<std::string> ranked;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].first != i + 1)
            throw InputError(fmt::format("profile '{}': ranks are not a permutation of 1..{}", language, rows.size()));
        ranked.push_back(std::move(rows[i].second));
    }
    if (ranked.size() > kProfileSize)
        throw InputError(fmt::format("profile '{}' has {} trigrams, limit is {}", language, ranked.size(), kProfileSize));
    return LanguageProfile(std::move(language), std::move(ranked));
}

LanguageProfile build_profile(std::string_view corpus, std::string language) {
    const std::size_t chars = text::utf8_length(corpus);
    if (chars < kMinCorpusChars)
        throw InputError(fmt::format("corpus for '{}' has {} characters, need at least {}", language, chars,
                                     kMinCorpusChars));
    std::vector<std::string> ranked;
    for (auto& [t, _] : ranked_trigrams(corpus, kProfileSize)) ranked.push_back(t);
    return LanguageProfile(std::move(language), std::move(ranked));
}

namespace {

std::size_t out_of_place(const LanguageProfile& profile, std::string_view trigram, std::size_t doc_rank) {
    const std::size_t p = profile.rank_of(trigram);
    if (p == 0) return profile.size();
    return p > doc_rank ? p - doc_rank : doc_rank - p;
}

}  // namespace

std::size_t distance(const std::vector<std::pair<std::string, std::size_t>>& doc, const LanguageProfile& profile) {
    std::size_t d = 0;
    for (std::size_t r = 0; r < doc.size(); ++r) d += out_of_place(profile, doc[r].first, r + 1);
    return d;
}

LanguageVerdict detect(std::string_view input, std::span<const LanguageProfile> profiles, double min_confidence) {
    if (profiles.empty()) throw InputError("language detection needs at least one profile");
    const std::string norm = normalize(input);
    if (text::utf8_length(norm) < kMinTextChars) return {"und", 0.0};

    const auto doc = ranked_trigrams(norm, kProfileSize);
    std::vector<std::pair<std::size_t, const LanguageProfile*>> scored;
    for (const auto& p : profiles) scored.emplace_back(distance(doc, p), &p);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first < b.first : a.second->language() < b.second->language();
    });

    // Each trigram's penalty gap between the two leading profiles; the
    // margin is their sum and the largest possible margin is the sum of
    // their magnitudes.
    double confidence = 0.0;
    if (scored.size() == 1) {
        const double worst = static_cast<double>(doc.size() * std::max<std::size_t>(1, scored[0].second->size()));
        confidence = worst > 0.0 ? 1.0 - static_cast<double>(scored[0].first) / worst : 0.0;
    } else {
        double margin = 0.0, max_margin = 0.0;
        for (std::size_t r = 0; r < doc.size(); ++r) {
            const double gap = static_cast<double>(out_of_place(*scored[1].second, doc[r].first, r + 1)) -
                               static_cast<double>(out_of_place(*scored[0].second, doc[r].first, r + 1));
            margin += gap;
            max_margin += std::abs(gap);
        }
        confidence = max_margin > 0.0 ? margin / max_margin : 0.0;
    }
    if (confidence < min_confidence) return {"und", confidence};
    return {scored[0].second->language(), confidence};
}

const std::vector<LanguageProfile>& builtin_profiles() {
    static const std::vector<LanguageProfile> profiles = [] {
        std::vector<LanguageProfile> v;
        v.push_back(LanguageProfile::parse("en", asset("langid/en.profile")));
        v.push_back(LanguageProfile::parse("fr", asset("langid/fr.profile")));
        return v;
    }();
    return profiles;
}

}  // namespace luthier::langid
