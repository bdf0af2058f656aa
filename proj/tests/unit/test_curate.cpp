// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <mutex>
#include <string>
#include <vector>

#include "luthier/curate.hpp"
#include "mock_llm.hpp"
#include "temp_dir.hpp"

using namespace luthier;
using namespace luthier::curate;
using namespace luthier::testing;

namespace {

Conversation conv(std::string source, std::vector<std::pair<Role, std::string>> turns) {
    Conversation c;
    c.source = std::move(source);
    for (auto& [r, t] : turns) c.messages.push_back({r, std::move(t)});
    c.id = c.content_id();
    return c;
}

const std::string kFrQ = "Quelle est la meilleure façon de conserver des herbes fraîches dans la cuisine ?";
const std::string kFrA = "Il suffit de les placer dans un verre d'eau, comme un bouquet, ou de les envelopper dans un linge humide.";
const std::string kEnQ = "What is the best way to keep fresh herbs in the kitchen for a long time?";
const std::string kEnA = "Put them in a glass of water like a bouquet, or wrap them in a damp towel in the fridge.";

CurateConfig cfg() {
    CurateConfig c;
    c.jobs = 4;
    c.translate_sources = {"en-src"};
    return c;
}

void check_conservation(const StageStats& s) {
    CHECK(s.kept + s.dropped + s.quarantined == s.input_count);
    std::size_t reasons = 0;
    for (const auto& [k, v] : s.breakdown) reasons += v;
    CHECK(reasons == s.dropped + s.quarantined);
}

// Records every request it serves, answering like MockLlm.
class Recorder final : public ChatBackend {
public:
    MockLlm inner;
    std::mutex mu;
    std::vector<ChatRequest> seen;
    std::string complete(const ChatRequest& r) override {
        {
            std::lock_guard lock(mu);
            seen.push_back(r);
        }
        return inner.complete(r);
    }
};

}  // namespace

TEST_SUITE("curate") {
    TEST_CASE("ingest") {
        TempDir dir;
        write_file(dir / "a.jsonl",
                   R"({"source":"s","messages":[{"role":"user","content":"Bonjour"},{"role":"assistant","content":"Salut"}]})"
                   "\n"
                   R"({"source":"s","messages":[{"role":"user","content":"Bonjour"},{"role":"assistant","content":"Salut"}]})"
                   "\n");
        auto r = ingest({dir / "a.jsonl"});
        REQUIRE(r.conversations.size() == 2);
        CHECK(r.conversations[0].id == r.conversations[1].id);
        CHECK(r.skipped.empty());

        std::string lines;
        for (int i = 0; i < 10; ++i)
            lines += R"({"id":"c)" + std::to_string(i) +
                     R"(","source":"s","messages":[{"role":"user","content":"x"}]})" "\n";
        lines += R"({"id":"bad","source":"s"})" "\n";
        write_file(dir / "b.jsonl", lines);
        r = ingest({dir / "b.jsonl"});
        CHECK(r.conversations.size() == 10);
        REQUIRE(r.skipped.size() == 1);
        CHECK(r.skipped[0].find(":11:") != std::string::npos);
        check_conservation(r.stats);

        write_file(dir / "c.jsonl", "{}\n" R"({"source":"s","messages":[{"role":"user","content":"x"}]})" "\n");
        CHECK_THROWS_AS(ingest({dir / "c.jsonl"}), InputError);
        CHECK_THROWS(ingest({dir / "missing.jsonl"}));
    }

    TEST_CASE("filter_french") {
        std::vector<Conversation> in{
            conv("s", {{Role::User, kFrQ}, {Role::Assistant, kFrA}}),
            conv("s", {{Role::User, kEnQ}, {Role::Assistant, kEnA}}),
            conv("s", {{Role::User, ""}}),
        };
        auto r = filter_french(in, langid::builtin_profiles(), langid::kDefaultMinConfidence);
        REQUIRE(r.kept.size() == 1);
        CHECK(r.kept[0].language == "fr");
        CHECK(r.stats.breakdown.at("en") == 1);
        CHECK(r.stats.breakdown.at("und") == 1);
        check_conservation(r.stats);
        // Idempotent on its own output.
        auto again = filter_french(r.kept, langid::builtin_profiles(), langid::kDefaultMinConfidence);
        CHECK(again.kept.size() == 1);
        CHECK(again.kept[0].to_json() == r.kept[0].to_json());
    }

    TEST_CASE("translate echo removes assistant turns") {
        MockLlm llm;
        llm.echo_translate = true;
        auto in = std::vector{conv("en-src", {{Role::User, "Hello there"},
                                              {Role::Assistant, "Hi"},
                                              {Role::User, "How are you?"},
                                              {Role::Assistant, "Fine"}})};
        auto r = translate_prompts(in, llm, cfg());
        REQUIRE(r.kept.size() == 1);
        const auto& m = r.kept[0].messages;
        REQUIRE(m.size() == 2);
        CHECK(m[0].content == "FR:Hello there");
        CHECK(m[1].content == "FR:How are you?");
        CHECK(m[0].role == Role::User);
        CHECK(m[1].role == Role::User);
        CHECK(llm.calls(RequestKind::Translate) == 2);
        CHECK(r.kept[0].provenance.back().rfind("translated@", 0) == 0);
    }

    TEST_CASE("hard gateway failure quarantines and the stage continues") {
        DownBackend down;
        auto in = std::vector{conv("en-src", {{Role::User, "Hello"}}), conv("en-src", {{Role::User, "World"}})};
        auto r = translate_prompts(in, down, cfg());
        CHECK(r.kept.empty());
        REQUIRE(r.quarantined.size() == 2);
        CHECK(r.quarantined[0].reason == "gateway-error");
        CHECK(r.quarantined[0].infrastructure);
        CHECK(r.quarantined[0].conversation.messages[0].content == "Hello");
        check_conservation(r.stats);
    }

    TEST_CASE("generation conditions on earlier answers") {
        Recorder rec;
        auto in = std::vector{conv("en-src", {{Role::User, "Premier"}, {Role::User, "Second"}})};
        // Roles must alternate for a stored conversation, but the generator works on user-only turns.
        auto r = generate_responses(in, rec, cfg());
        REQUIRE(r.kept.size() == 1);
        REQUIRE(r.kept[0].messages.size() == 4);
        REQUIRE(rec.seen.size() == 2);
        CHECK(rec.seen[0].messages.size() == 1);
        REQUIRE(rec.seen[1].messages.size() == 3);
        CHECK(rec.seen[1].messages[1].role == Role::Assistant);
        CHECK(rec.seen[1].messages[1].content == r.kept[0].messages[1].content);
        CHECK(r.kept[0].provenance.back() == "generated");

        MockLlm empty;
        empty.override_reply = [](const ChatRequest&) { return std::optional<std::string>(""); };
        auto q = generate_responses({conv("s", {{Role::User, "Question"}})}, empty, cfg());
        REQUIRE(q.quarantined.size() == 1);
        CHECK(q.quarantined[0].reason == "empty-response");
    }

    TEST_CASE("judges") {
        MockLlm llm;
        std::vector<Conversation> in{
            conv("s", {{Role::User, kFrQ}, {Role::Assistant, kFrA}}),
            conv("s", {{Role::User, kFrQ + " Zorglub"}, {Role::Assistant, kFrA}}),
            conv("s", {{Role::User, kFrQ}, {Role::Assistant, "def f(x):\n    return x"}}),
        };
        auto content = judge_filter(in, llm, JudgeStage::Content, cfg());
        CHECK(content.kept.size() == 1);
        REQUIRE(content.quarantined.size() == 1);
        CHECK(content.quarantined[0].reason == "unparseable-verdict");
        CHECK(content.quarantined[0].detail == "maybe");
        CHECK_FALSE(content.quarantined[0].infrastructure);
        CHECK(content.stats.breakdown.at("rejected:content") == 1);
        check_conservation(content.stats);

        MockLlm yes;
        yes.override_reply = [](const ChatRequest&) { return std::optional<std::string>("True"); };
        auto ling = judge_filter(in, yes, JudgeStage::Linguistic, cfg());
        CHECK(ling.kept.size() == 3);
        CHECK(ling.kept[0].provenance.back().rfind("judge:linguistic@", 0) == 0);
        auto incomplete = judge_filter({conv("s", {{Role::User, kFrQ}})}, yes, JudgeStage::Linguistic, cfg());
        CHECK(incomplete.stats.breakdown.at("incomplete") == 1);
    }

    TEST_CASE("judge payload") {
        const auto c = conv("s", {{Role::User, "Q"}, {Role::Assistant, "R"}});
        CHECK(judge_payload(c) == "Question :\nQ\n\nRéponse :\nR");
    }

    TEST_CASE("dedup") {
        std::vector<Conversation> in{
            conv("a", {{Role::User, "Bonjour  le MONDE"}, {Role::Assistant, "un"}}),
            conv("b", {{Role::User, "bonjour le monde"}, {Role::Assistant, "deux"}}),
            conv("c", {{Role::User, "Autre question"}, {Role::Assistant, "un"}}),
            conv("a", {{Role::User, "Bonjour  le MONDE"}, {Role::Assistant, "un"}}),
        };
        auto r = dedup(in);
        REQUIRE(r.kept.size() == 2);
        CHECK(r.kept[0].source == "a");
        CHECK(r.kept[1].source == "c");
        CHECK(r.stats.breakdown.at("duplicate") == 2);
        CHECK(dedup(r.kept).kept.size() == 2);
    }

    TEST_CASE("largest remainder") {
        auto s = largest_remainder({{"A", 2}, {"B", 1}});
        REQUIRE(s.size() == 2);
        CHECK(s[0].label == "A");
        CHECK(s[0].percent() == "66.67");
        CHECK(s[1].percent() == "33.33");
        CHECK(largest_remainder({}).empty());
        auto thirds = largest_remainder({{"x", 1}, {"y", 1}, {"z", 1}});
        std::uint32_t total = 0;
        for (const auto& sh : thirds) total += sh.hundredths;
        CHECK(total == 10000);
        CHECK(thirds[0].percent() == "33.34");
        CHECK(thirds[0].label == "x");
        const auto st = corpus_stats({});
        CHECK(st.sample_count == 0);
        CHECK(st.by_subject.empty());
    }

    TEST_CASE("pipeline keeps input order and conserves counts at every stage") {
        MockLlm llm;
        llm.echo_translate = false;
        llm.translations[kEnQ] = kFrQ + " (traduit)";
        std::vector<Conversation> in;
        for (int i = 0; i < 12; ++i) {
            if (i % 3 == 2)
                in.push_back(conv("en-src", {{Role::User, kEnQ + " #" + std::to_string(i)}, {Role::Assistant, kEnA}}));
            else
                in.push_back(conv("fr", {{Role::User, kFrQ + " Numéro " + std::to_string(i) + "."},
                                         {Role::Assistant, kFrA}}));
        }
        in.push_back(conv("en-src", {{Role::User, kEnQ}, {Role::Assistant, kEnA}}));
        auto r = run_pipeline(in, llm, cfg(), langid::builtin_profiles());
        for (const auto& s : r.stages) check_conservation(s);
        CHECK(r.output.size() == 9);
        CHECK(r.output.back().messages[0].content == kFrQ + " (traduit)");
        CHECK(r.output.back().provenance.size() >= 4);
        std::vector<std::string> expected;
        for (int i = 0; i < 12; ++i)
            if (i % 3 != 2) expected.push_back(kFrQ + " Numéro " + std::to_string(i) + ".");
        for (std::size_t i = 0; i < expected.size(); ++i) CHECK(r.output[i].messages[0].content == expected[i]);
        CHECK(r.quarantine.size() == 4);  // untranslatable prompts come back empty
        CHECK_FALSE(r.infrastructure_failure());
        for (const auto& c : r.output) CHECK(c.token_count.has_value());
    }
}
