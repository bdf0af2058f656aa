// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include "luthier/curate.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <unordered_set>

#include <fmt/core.h>

#include "luthier/assets.hpp"
#include "luthier/error.hpp"
#include "luthier/hash.hpp"
#include "luthier/parallel.hpp"
#include "luthier/text.hpp"

namespace luthier::curate {

void StageStats::check() const {
    if (kept + dropped + quarantined != input_count)
        throw std::logic_error(fmt::format("stage '{}' lost items: {} kept + {} dropped + {} quarantined != {} in",
                                           stage, kept, dropped, quarantined, input_count));
}

nlohmann::ordered_json StageStats::to_json() const {
    nlohmann::ordered_json j;
    j["stage"] = stage;
    j["input_count"] = input_count;
    j["kept"] = kept;
    j["dropped"] = dropped;
    j["quarantined"] = quarantined;
    j["breakdown"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : breakdown) j["breakdown"][k] = v;
    return j;
}

nlohmann::ordered_json QuarantineRecord::to_json() const {
    nlohmann::ordered_json j;
    j["stage"] = stage;
    j["reason"] = reason;
    j["detail"] = detail;
    j["infrastructure"] = infrastructure;
    j["conversation"] = conversation.to_json();
    return j;
}

IngestResult ingest(const std::vector<std::filesystem::path>& paths) {
    IngestResult r;
    r.stats.stage = "ingest";
    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw InputError(fmt::format("cannot read input file '{}'", path.string()));
        std::string line;
        std::size_t line_no = 0, lines = 0, bad = 0;
        std::vector<std::string> skipped;
        std::vector<Conversation> good;
        while (std::getline(in, line)) {
            ++line_no;
            if (text::trim(line).empty()) continue;
            ++lines;
            try {
                good.push_back(Conversation::from_json(nlohmann::json::parse(line)));
            } catch (const nlohmann::json::exception& e) {
                ++bad;
                skipped.push_back(fmt::format("{}:{}: invalid JSON ({})", path.string(), line_no, e.what()));
            } catch (const InputError& e) {
                ++bad;
                skipped.push_back(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
            }
        }
        if (bad * 10 > lines)
            throw InputError(fmt::format("{}: {} of {} lines malformed (more than 10%); first: {}", path.string(), bad,
                                         lines, skipped.front()));
        r.stats.input_count += lines;
        r.stats.kept += good.size();
        r.stats.dropped += bad;
        if (bad) r.stats.breakdown["malformed"] += bad;
        for (auto& c : good) r.conversations.push_back(std::move(c));
        for (auto& s : skipped) r.skipped.push_back(std::move(s));
    }
    r.stats.check();
    return r;
}

void CurateConfig::validate() const {
    if (translate_model.empty() || generate_model.empty() || judge_model.empty())
        throw ConfigError("curate: model names must be non-empty");
    if (!(translate_temperature >= 0 && generate_temperature >= 0 && judge_temperature >= 0))
        throw ConfigError("curate: temperatures must be >= 0");
    if (max_tokens <= 0 || judge_max_tokens <= 0) throw ConfigError("curate: max_tokens must be positive");
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0))
        throw ConfigError(fmt::format("curate.min_confidence = {} is outside [0, 1]", min_confidence));
    if (jobs == 0) throw ConfigError("curate: jobs must be positive");
    counter.validate();
}

namespace {

struct Outcome {
    enum class Kind { Keep, Drop, Quarantine };
    Kind kind = Kind::Keep;
    std::string reason;
    std::string detail;
    bool infrastructure = false;

    static Outcome keep() { return {}; }
    static Outcome drop(std::string reason) { return {Kind::Drop, std::move(reason), {}, false}; }
    static Outcome quarantine(std::string reason, std::string detail, bool infra) {
        return {Kind::Quarantine, std::move(reason), std::move(detail), infra};
    }
};

// Applies `fn` to a copy of every item (concurrently up to `jobs`) and
// assembles kept items in input order.
template <class Fn>
StageResult run_stage(std::string name, std::vector<Conversation> in, unsigned jobs, Fn fn) {
    std::vector<std::optional<Conversation>> work(in.size());
    std::vector<Outcome> outcomes(in.size());
    parallel_for(in.size(), jobs, [&](std::size_t i) {
        Conversation c = in[i];
        try {
            outcomes[i] = fn(c);
        } catch (const GatewayError& e) {
            outcomes[i] = Outcome::quarantine("gateway-error", e.what(), true);
        } catch (const IoError& e) {
            outcomes[i] = Outcome::quarantine("io-error", e.what(), true);
        }
        if (outcomes[i].kind == Outcome::Kind::Keep) work[i] = std::move(c);
    });

    StageResult r;
    r.stats.stage = name;
    r.stats.input_count = in.size();
    for (std::size_t i = 0; i < in.size(); ++i) {
        auto& o = outcomes[i];
        switch (o.kind) {
        case Outcome::Kind::Keep:
            r.kept.push_back(std::move(*work[i]));
            r.kept_indices.push_back(i);
            ++r.stats.kept;
            break;
        case Outcome::Kind::Drop:
            ++r.stats.dropped;
            ++r.stats.breakdown[o.reason];
            break;
        case Outcome::Kind::Quarantine:
            ++r.stats.quarantined;
            ++r.stats.breakdown[o.reason];
            r.quarantined.push_back({std::move(in[i]), name, o.reason, o.detail, o.infrastructure});
            break;
        }
    }
    r.stats.check();
    return r;
}

std::string prompt_tag(std::string_view prompt) {
    return sha256_hex(prompt).substr(0, 8);
}

std::string detection_text(const Conversation& c) {
    std::string s;
    for (const auto& m : c.messages) {
        if (m.role == Role::System) continue;
        if (!s.empty()) s += '\n';
        s += m.content;
    }
    return s;
}

Outcome check_language(Conversation& c, const std::string& expected, std::span<const langid::LanguageProfile> profiles,
                       double min_confidence) {
    const auto verdict = langid::detect(detection_text(c), profiles, min_confidence);
    if (verdict.language != expected) return Outcome::drop(verdict.language);
    c.language = verdict.language;
    c.stamp("language:" + verdict.language);
    return Outcome::keep();
}

}  // namespace

StageResult filter_french(std::vector<Conversation> in, std::span<const langid::LanguageProfile> profiles,
                          double min_confidence) {
    return run_stage("language", std::move(in), 1, [&](Conversation& c) {
        return check_language(c, "fr", profiles, min_confidence);
    });
}

StageResult translate_prompts(std::vector<Conversation> in, ChatBackend& gateway, const CurateConfig& config) {
    const std::string_view prompt = asset("prompts/translate.txt");
    const std::string stamp = "translated@" + prompt_tag(prompt);
    return run_stage("translate", std::move(in), config.jobs, [&](Conversation& c) {
        std::vector<ChatMessage> out;
        for (const auto& m : c.messages) {
            if (m.role == Role::Assistant) continue;
            if (m.content.empty()) return Outcome::drop("empty-prompt");
            ChatRequest req{config.translate_model,
                            {{Role::System, std::string(prompt)}, {Role::User, m.content}},
                            config.translate_temperature,
                            config.max_tokens};
            std::string fr = text::trim(gateway.complete(req));
            if (fr.empty()) return Outcome::quarantine("empty-response", "translation came back empty", false);
            out.push_back({m.role, std::move(fr)});
        }
        c.messages = std::move(out);
        c.language.reset();
        c.stamp(stamp);
        return Outcome::keep();
    });
}

StageResult generate_responses(std::vector<Conversation> in, ChatBackend& gateway, const CurateConfig& config) {
    return run_stage("generate", std::move(in), config.jobs, [&](Conversation& c) {
        for (const auto& m : c.messages) {
            if (m.role == Role::Assistant) return Outcome::drop("has-assistant-turns");
        }
        std::vector<ChatMessage> history;
        for (const auto& m : c.messages) {
            history.push_back(m);
            if (m.role != Role::User) continue;
            ChatRequest req{config.generate_model, history, config.generate_temperature, config.max_tokens};
            std::string answer = text::trim(gateway.complete(req));
            if (answer.empty()) return Outcome::quarantine("empty-response", "generation came back empty", false);
            history.push_back({Role::Assistant, std::move(answer)});
        }
        c.messages = std::move(history);
        c.stamp("generated");
        return Outcome::keep();
    });
}

std::string_view judge_stage_name(JudgeStage stage) noexcept {
    return stage == JudgeStage::Content ? "content" : "linguistic";
}

std::string judge_payload(const Conversation& conv) {
    std::string s;
    for (const auto& m : conv.messages) {
        if (m.role == Role::System) continue;
        if (!s.empty()) s += "\n\n";
        s += m.role == Role::User ? "Question :\n" : "Réponse :\n";
        s += m.content;
    }
    return s;
}

StageResult judge_filter(std::vector<Conversation> in, ChatBackend& gateway, JudgeStage stage,
                         const CurateConfig& config) {
    const std::string_view prompt =
        asset(stage == JudgeStage::Content ? "prompts/judge_content.txt" : "prompts/judge_linguistic.txt");
    const std::string name = fmt::format("judge:{}", judge_stage_name(stage));
    const std::string stamp = name + "@" + prompt_tag(prompt);
    return run_stage(name, std::move(in), config.jobs, [&](Conversation& c) {
        const bool has_user = std::any_of(c.messages.begin(), c.messages.end(),
                                          [](const ChatMessage& m) { return m.role == Role::User; });
        const bool has_assistant = std::any_of(c.messages.begin(), c.messages.end(),
                                               [](const ChatMessage& m) { return m.role == Role::Assistant; });
        if (!has_user || !has_assistant) return Outcome::drop("incomplete");
        ChatRequest req{config.judge_model,
                        {{Role::System, std::string(prompt)}, {Role::User, judge_payload(c)}},
                        config.judge_temperature,
                        config.judge_max_tokens};
        const std::string raw = gateway.complete(req);
        try {
            if (!parse_verdict(raw).keep) return Outcome::drop(fmt::format("rejected:{}", judge_stage_name(stage)));
        } catch (const VerdictError& e) {
            return Outcome::quarantine("unparseable-verdict", e.raw(), false);
        }
        c.stamp(stamp);
        return Outcome::keep();
    });
}

StageResult dedup(std::vector<Conversation> in) {
    std::vector<std::string> keys(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        std::string users;
        for (const auto& m : in[i].messages) {
            if (m.role != Role::User) continue;
            users += m.content;
            users += '\n';
        }
        keys[i] = sha256_hex(text::fold_and_collapse(users));
    }
    std::unordered_set<std::string> seen;
    std::size_t i = 0;
    return run_stage("dedup", std::move(in), 1, [&](Conversation&) {
        return seen.insert(keys[i++]).second ? Outcome::keep() : Outcome::drop("duplicate");
    });
}

std::string Share::percent() const {
    return fmt::format("{}.{:02}", hundredths / 100, hundredths % 100);
}

std::vector<Share> largest_remainder(const std::map<std::string, std::size_t>& counts) {
    std::vector<Share> out;
    std::uint64_t total = 0;
    for (const auto& [label, n] : counts) total += n;
    if (total == 0) return out;

    std::vector<std::uint64_t> rem;
    std::uint64_t assigned = 0;
    for (const auto& [label, n] : counts) {
        const std::uint64_t scaled = static_cast<std::uint64_t>(n) * 10'000;
        out.push_back({label, n, static_cast<std::uint32_t>(scaled / total)});
        rem.push_back(scaled % total);
        assigned += scaled / total;
    }
    std::vector<std::size_t> order(out.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rem[a] != rem[b]) return rem[a] > rem[b];
        if (out[a].count != out[b].count) return out[a].count > out[b].count;
        return out[a].label < out[b].label;
    });
    for (std::size_t k = 0; assigned < 10'000; ++k, ++assigned) ++out[order[k]].hundredths;

    std::stable_sort(out.begin(), out.end(), [](const Share& a, const Share& b) { return a.count > b.count; });
    return out;
}

nlohmann::ordered_json CorpusStats::to_json() const {
    auto shares = [](const std::vector<Share>& v) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& s : v) {
            nlohmann::ordered_json o;
            o["label"] = s.label;
            o["count"] = s.count;
            o["percent"] = s.percent();
            arr.push_back(std::move(o));
        }
        return arr;
    };
    nlohmann::ordered_json j;
    j["sample_count"] = sample_count;
    j["token_total"] = token_total;
    j["by_source"] = shares(by_source);
    j["by_subject"] = shares(by_subject);
    return j;
}

CorpusStats corpus_stats(const std::vector<Conversation>& corpus) {
    CorpusStats s;
    std::map<std::string, std::size_t> sources, subjects;
    for (const auto& c : corpus) {
        if (!c.token_count) throw InputError(fmt::format("conversation '{}' has no token_count", c.id));
        ++s.sample_count;
        s.token_total += *c.token_count;
        ++sources[c.source];
        if (c.subject) ++subjects[*c.subject];
    }
    s.by_source = largest_remainder(sources);
    s.by_subject = largest_remainder(subjects);
    return s;
}

bool PipelineResult::infrastructure_failure() const {
    return std::any_of(quarantine.begin(), quarantine.end(), [](const auto& q) { return q.infrastructure; });
}

PipelineResult run_pipeline(std::vector<Conversation> input, ChatBackend& gateway, const CurateConfig& config,
                            std::span<const langid::LanguageProfile> profiles) {
    config.validate();
    PipelineResult out;
    auto absorb = [&](StageResult& r) {
        out.stages.push_back(r.stats);
        for (auto& q : r.quarantined) out.quarantine.push_back(std::move(q));
    };

    const std::unordered_set<std::string> translate(config.translate_sources.begin(), config.translate_sources.end());
    std::vector<bool> route(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) route[i] = translate.count(input[i].source) > 0;

    // Translation sources keep their French conversations and route English
    // ones to translation; everything else must already be French.
    std::vector<bool> to_translate;
    auto lang = [&] {
        std::size_t i = 0;
        return run_stage("language", std::move(input), 1, [&](Conversation& c) {
            const bool routable = route[i++];
            auto o = check_language(c, "fr", profiles, config.min_confidence);
            if (o.kind == Outcome::Kind::Keep || !routable || o.reason != "en") {
                if (o.kind == Outcome::Kind::Keep) to_translate.push_back(false);
                return o;
            }
            c.language.reset();
            to_translate.push_back(true);
            return Outcome::keep();
        });
    }();
    absorb(lang);

    std::vector<std::optional<Conversation>> slots(lang.kept.size());
    std::vector<Conversation> english;
    std::vector<std::size_t> english_pos;
    for (std::size_t i = 0; i < lang.kept.size(); ++i) {
        if (to_translate[i]) {
            english.push_back(std::move(lang.kept[i]));
            english_pos.push_back(i);
        } else {
            slots[i] = std::move(lang.kept[i]);
        }
    }

    auto translated = translate_prompts(std::move(english), gateway, config);
    absorb(translated);
    auto generated = generate_responses(std::move(translated.kept), gateway, config);
    absorb(generated);
    for (std::size_t k = 0; k < generated.kept.size(); ++k) {
        auto& c = generated.kept[k];
        c.language = "fr";
        slots[english_pos[translated.kept_indices[generated.kept_indices[k]]]] = std::move(c);
    }

    std::vector<Conversation> french;
    for (auto& s : slots)
        if (s) french.push_back(std::move(*s));

    auto linguistic = judge_filter(std::move(french), gateway, JudgeStage::Linguistic, config);
    absorb(linguistic);
    auto content = judge_filter(std::move(linguistic.kept), gateway, JudgeStage::Content, config);
    absorb(content);
    auto unique = dedup(std::move(content.kept));
    absorb(unique);

    out.output = std::move(unique.kept);
    for (auto& c : out.output) c.token_count = count_tokens(c, config.counter);
    out.stats = corpus_stats(out.output);
    return out;
}

}  // namespace luthier::curate
