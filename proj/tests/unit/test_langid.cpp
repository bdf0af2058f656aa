// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "luthier/assets.hpp"
#include "luthier/error.hpp"
#include "luthier/langid.hpp"

using namespace luthier;
using namespace luthier::langid;

namespace {

std::vector<std::string> top(const LanguageProfile& p, std::size_t n) {
    return {p.ranked().begin(), p.ranked().begin() + std::min(n, p.size())};
}

const LanguageProfile& profile_for(const std::string& lang) {
    for (const auto& p : builtin_profiles())
        if (p.language() == lang) return p;
    throw std::runtime_error("no profile " + lang);
}

}  // namespace

TEST_SUITE("langid") {
    TEST_CASE("normalization and trigrams") {
        CHECK(normalize("L'Été, 2024 !") == "l été");
        CHECK(normalize("42 — 17 %") == "");
        CHECK(trigrams("Le chat") == std::vector<std::string>{"_le", "le_", "_ch", "cha", "hat", "at_"});
        CHECK(trigrams("a") == std::vector<std::string>{"_a_"});
        const auto r = ranked_trigrams("aaaa aaaa", 2);
        REQUIRE(r.size() == 2);
        CHECK(r[0] == std::pair<std::string, std::size_t>{"aaa", 4});
    }

    TEST_CASE("profile building") {
        std::string corpus;
        while (corpus.size() < kMinCorpusChars) corpus += "aaaa ";
        const auto p = build_profile(corpus, "xx");
        CHECK(p.ranked().front() == "aaa");
        CHECK(build_profile(corpus, "xx") == p);
        CHECK_THROWS_AS(build_profile("trop court", "fr"), InputError);
        CHECK(p.rank_of("aaa") == 1);
        CHECK(p.rank_of("zzz") == 0);
        CHECK(LanguageProfile::parse("xx", p.serialize()) == p);
    }

    TEST_CASE("shipped profiles are rebuilt from the shipped corpora") {
        for (const std::string lang : {"en", "fr"}) {
            const auto rebuilt = build_profile(asset("langid/" + lang + ".corpus.txt"), lang);
            CHECK(rebuilt == profile_for(lang));
            CHECK(rebuilt.size() == kProfileSize);
        }
    }

    TEST_CASE("french top trigrams agree with an independent count") {
        // Counted with a separate script over langid/fr.corpus.txt.
        const std::vector<std::string> expected{"es_", "_de", "_le", "nt_", "de_", "ent", "les", "des", "le_", "et_",
                                                "_la", "on_", "ne_", "la_", "re_", "ion", "_et", "que", "_un", "tio"};
        const auto t = top(profile_for("fr"), 20);
        CHECK(t == expected);
        CHECK(std::find(t.begin(), t.end(), "_de") != t.end());
        CHECK(std::find(t.begin(), t.end(), "es_") != t.end());
        CHECK(top(profile_for("en"), 3) == std::vector<std::string>{"_th", "the", "he_"});
    }

    TEST_CASE("detect examples") {
        const auto& profiles = builtin_profiles();
        const auto fr = detect("Le chat dort sur le canapé parce qu'il fait froid dehors.", profiles);
        CHECK(fr.language == "fr");
        CHECK(fr.confidence > 0.0);
        CHECK(fr.confidence <= 1.0);
        CHECK(detect("The committee approved the proposal after extensive deliberation yesterday.", profiles).language ==
              "en");
        CHECK(detect("42 — 17 %", profiles).language == "und");
        CHECK(detect("Bonjour", profiles).language == "und");
        CHECK(detect("Le chat dort sur le canapé parce qu'il fait froid dehors.", profiles, 1.0).language == "und");
    }

    TEST_CASE("single profile confidence") {
        const std::vector<LanguageProfile> only{profile_for("fr")};
        const auto v = detect("Le chat dort sur le canapé parce qu'il fait froid dehors.", only, 0.0);
        CHECK(v.language == "fr");
        CHECK(v.confidence > 0.0);
        CHECK(v.confidence < 1.0);
    }

    TEST_CASE("confidence grows with margin") {
        const auto& profiles = builtin_profiles();
        const auto clear = detect("Les enfants jouent dans le jardin pendant que les parents préparent le repas.",
                                  profiles, 0.0);
        const auto mixed = detect("Les enfants jouent in the garden while the parents prepare the meal.", profiles, 0.0);
        CHECK(clear.language == "fr");
        CHECK(clear.confidence > mixed.confidence);
    }

    TEST_CASE("verdict does not depend on profile order") {
        std::vector<LanguageProfile> profiles = builtin_profiles();
        std::string corpus;
        while (corpus.size() < kMinCorpusChars) corpus += "ein Hund und eine Katze leben zusammen im Haus ";
        profiles.push_back(build_profile(corpus, "de"));
        const std::vector<std::string> texts{
            "Le chat dort sur le canapé parce qu'il fait froid dehors.",
            "The committee approved the proposal after extensive deliberation yesterday.",
            "Ein Hund und eine Katze leben zusammen im großen Haus.",
            "Mixed texte avec some English words and quelques mots français.",
        };
        std::mt19937 rng(8);
        std::vector<LanguageVerdict> baseline;
        for (const auto& t : texts) baseline.push_back(detect(t, profiles, 0.0));
        for (int round = 0; round < 10; ++round) {
            std::shuffle(profiles.begin(), profiles.end(), rng);
            for (std::size_t i = 0; i < texts.size(); ++i) CHECK(detect(texts[i], profiles, 0.0) == baseline[i]);
        }
        // Two identical profiles under different codes tie; the smaller code wins.
        std::vector<LanguageProfile> twins{LanguageProfile("zz", profile_for("fr").ranked()), profile_for("fr")};
        CHECK(detect(texts[0], twins, 0.0).language == "fr");
        std::reverse(twins.begin(), twins.end());
        CHECK(detect(texts[0], twins, 0.0).language == "fr");
    }
}
