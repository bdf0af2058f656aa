// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include "luthier/scholar.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <regex>
#include <sstream>

#include <fmt/core.h>

#include "luthier/assets.hpp"
#include "luthier/error.hpp"
#include "luthier/hash.hpp"
#include "luthier/latex.hpp"
#include "luthier/pack.hpp"
#include "luthier/parallel.hpp"
#include "luthier/text.hpp"

namespace luthier::scholar {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

const std::vector<std::string>& subjects() {
    static const std::vector<std::string> s{"Mathematics", "Physics-Chemistry", "Computer Science",
                                            "Engineering Science", "Biology", "Other"};
    return s;
}

bool is_subject(std::string_view s) {
    const auto& all = subjects();
    return std::find(all.begin(), all.end(), s) != all.end();
}

std::string_view kind_name(DocKind k) noexcept {
    return k == DocKind::SubjectSheet ? "subject-sheet" : "solution-sheet";
}

std::optional<DocKind> parse_kind(std::string_view s) noexcept {
    if (s == "subject-sheet") return DocKind::SubjectSheet;
    if (s == "solution-sheet") return DocKind::SolutionSheet;
    return std::nullopt;
}

void ExamDoc::validate() const {
    if (doc_id.empty()) throw InputError("exam document without id");
    if (pages.empty()) throw InputError(fmt::format("{}: no pages", doc_id));
    if (!is_subject(subject)) throw InputError(fmt::format("{}: unknown subject '{}'", doc_id, subject));
    if (year < kMinYear || year > kMaxYear)
        throw InputError(fmt::format("{}: year {} outside [{}, {}]", doc_id, year, kMinYear, kMaxYear));
}

std::string ExamDoc::text() const {
    std::string out;
    for (std::size_t i = 0; i < pages.size(); ++i) {
        if (i) out += '\n';
        out += pages[i];
    }
    return out;
}

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot read {}", p.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string default_exam_key(std::string_view doc_id) {
    for (std::string_view suffix : {"-sujet", "-corrige", "_sujet", "_corrige"})
        if (ends_with(doc_id, suffix)) return std::string(doc_id.substr(0, doc_id.size() - suffix.size()));
    return std::string(doc_id);
}

ExamDoc load_doc(const fs::path& dir, const std::string& doc_id) {
    ExamDoc doc;
    doc.doc_id = doc_id;
    const auto meta_path = dir / (doc_id + ".meta.json");
    json meta;
    try {
        meta = json::parse(slurp(meta_path));
    } catch (const json::exception& e) {
        throw InputError(fmt::format("{}: {}", meta_path.string(), e.what()));
    }
    if (!meta.is_object()) throw InputError(fmt::format("{}: expected an object", meta_path.string()));
    for (const auto& [k, v] : meta.items()) {
        if (k == "subject" && v.is_string()) {
            doc.subject = v.get<std::string>();
        } else if (k == "year" && v.is_number_integer()) {
            doc.year = v.get<int>();
        } else if (k == "kind" && v.is_string()) {
            const auto kind = parse_kind(v.get<std::string>());
            if (!kind) throw InputError(fmt::format("{}: kind must be subject-sheet or solution-sheet", meta_path.string()));
            doc.kind = *kind;
        } else if (k == "exam" && v.is_string()) {
            doc.exam = v.get<std::string>();
        } else {
            throw InputError(fmt::format("{}: unexpected or mistyped key '{}'", meta_path.string(), k));
        }
    }
    for (const char* required : {"subject", "year", "kind"})
        if (!meta.contains(required)) throw InputError(fmt::format("{}: missing '{}'", meta_path.string(), required));
    if (doc.exam.empty()) doc.exam = default_exam_key(doc_id);

    const auto pages_path = dir / (doc_id + ".pages.jsonl");
    std::istringstream lines(slurp(pages_path));
    std::string line;
    for (std::size_t n = 1; std::getline(lines, line); ++n) {
        if (text::trim(line).empty()) continue;
        try {
            const auto page = json::parse(line);
            if (!page.is_string()) throw InputError("expected a JSON string");
            doc.pages.push_back(page.get<std::string>());
        } catch (const json::exception& e) {
            throw InputError(fmt::format("{}:{}: {}", pages_path.string(), n, e.what()));
        } catch (const InputError& e) {
            throw InputError(fmt::format("{}:{}: {}", pages_path.string(), n, e.what()));
        }
    }
    doc.validate();
    return doc;
}

}  // namespace

std::vector<ExamDoc> load_exam_dir(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw InputError(fmt::format("{} is not a directory", dir.string()));
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && ends_with(name, ".meta.json"))
            ids.push_back(name.substr(0, name.size() - std::string_view(".meta.json").size()));
    }
    std::sort(ids.begin(), ids.end());
    std::vector<ExamDoc> docs;
    docs.reserve(ids.size());
    for (const auto& id : ids) docs.push_back(load_doc(dir, id));
    return docs;
}

Screen screen_scanned(const ExamDoc& doc, std::size_t min_chars_per_page) {
    if (doc.pages.empty()) return Screen::Scanned;
    std::size_t chars = 0;
    for (const auto& page : doc.pages)
        for (char32_t cp : text::decode_utf8(page))
            if (!text::is_space(cp)) ++chars;
    // mean < threshold, kept in integers
    return chars < min_chars_per_page * doc.pages.size() ? Screen::Scanned : Screen::Usable;
}

std::vector<MarkerRule> parse_marker_rules(std::string_view table) {
    std::vector<MarkerRule> rules;
    std::size_t n = 0;
    while (!table.empty()) {
        ++n;
        const auto eol = table.find('\n');
        std::string_view line = table.substr(0, eol);
        table = eol == std::string_view::npos ? std::string_view{} : table.substr(eol + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;

        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string_view::npos) throw InputError(fmt::format("marker table line {}: expected 3 fields", n));
        MarkerRule rule;
        const auto lvl = line.substr(0, t1);
        const auto [ptr, err] = std::from_chars(lvl.data(), lvl.data() + lvl.size(), rule.level);
        if (err != std::errc{} || ptr != lvl.data() + lvl.size() || rule.level < 0)
            throw InputError(fmt::format("marker table line {}: bad level '{}'", n, lvl));
        rule.prefix = std::string(line.substr(t1 + 1, t2 - t1 - 1));
        if (rule.prefix == "-") rule.prefix.clear();
        rule.pattern = std::string(line.substr(t2 + 1));
        try {
            std::regex probe(rule.pattern, std::regex::ECMAScript | std::regex::icase);
            if (probe.mark_count() < 1) throw InputError(fmt::format("marker table line {}: no capture group", n));
        } catch (const std::regex_error& e) {
            throw InputError(fmt::format("marker table line {}: {}", n, e.what()));
        }
        rules.push_back(std::move(rule));
    }
    if (rules.empty()) throw InputError("marker table is empty");
    return rules;
}

const std::vector<MarkerRule>& builtin_marker_rules() {
    static const std::vector<MarkerRule> rules = parse_marker_rules(asset("scholar/markers.txt"));
    return rules;
}

namespace {

struct Hit {
    std::size_t begin;
    std::size_t length;
    const MarkerRule* rule;
    std::string label;
};

std::string join_key(const std::map<int, std::string>& path) {
    std::string key;
    for (const auto& [level, part] : path) {
        if (!key.empty()) key += '/';
        key += part;
    }
    return key;
}

}  // namespace

Segmentation segment_questions(std::string_view text, std::span<const MarkerRule> rules) {
    std::vector<std::regex> compiled;
    compiled.reserve(rules.size());
    for (const auto& r : rules) compiled.emplace_back(r.pattern, std::regex::ECMAScript | std::regex::icase);

    std::vector<Hit> hits;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::size_t p = pos;
        while (p < eol && (text[p] == ' ' || text[p] == '\t')) ++p;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            std::match_results<std::string_view::const_iterator> m;
            if (std::regex_search(text.begin() + p, text.begin() + eol, m, compiled[r],
                                  std::regex_constants::match_continuous)) {
                hits.push_back({p, static_cast<std::size_t>(m.length(0)), &rules[r], text::to_lower_ascii(m.str(1))});
                break;
            }
        }
        pos = eol + 1;
    }

    Segmentation out;
    if (hits.empty()) {
        out.unsegmented = true;
        out.segments.push_back({"", "", "", 0, 0, text.size(), text::trim(text), true});
        return out;
    }

    std::map<int, std::string> path;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const auto& h = hits[i];
        Segment s;
        s.begin = h.begin;
        s.end = i + 1 < hits.size() ? hits[i + 1].begin : text.size();
        s.marker = text::trim(text.substr(h.begin, h.length));
        s.label = h.label;
        s.level = h.rule->level;
        s.text = text::trim(text.substr(h.begin + h.length, s.end - h.begin - h.length));
        path.erase(path.lower_bound(s.level), path.end());
        path[s.level] = h.rule->prefix.empty() ? h.label : h.rule->prefix + " " + h.label;
        s.key = join_key(path);
        out.segments.push_back(std::move(s));
    }
    for (std::size_t i = 0; i + 1 < out.segments.size(); ++i)
        out.segments[i].leaf = out.segments[i + 1].level <= out.segments[i].level;
    return out;
}

Segmentation segment_questions(const ExamDoc& doc) {
    return segment_questions(doc.text(), builtin_marker_rules());
}

std::string QAItem::user_turn() const {
    if (context.empty()) return question;
    return context + "\n\n" + question;
}

namespace {

std::string prompt_tag(std::string_view name) {
    return sha256_hex(asset(name)).substr(0, 8);
}

}  // namespace

Conversation QAItem::to_conversation() const {
    Conversation c;
    c.source = "scholar";
    c.messages = {{Role::User, user_turn()}, {Role::Assistant, response}};
    c.subject = subject;
    c.language = "fr";
    c.stamp("scholar:extract@" + prompt_tag("prompts/scholar_extract.txt"));
    c.stamp("scholar:refine@" + prompt_tag("prompts/scholar_refine.txt"));
    c.id = c.content_id();
    return c;
}

ordered_json QAItem::to_json() const {
    ordered_json j;
    const auto conv = to_conversation();
    j["id"] = conv.id;
    j["source"] = conv.source;
    j["doc_id"] = doc_id;
    j["marker"] = marker;
    j["subject"] = subject;
    j["question"] = question;
    j["context"] = context;
    j["reponse"] = response;
    if (!flags.empty()) j["flags"] = flags;
    auto& msgs = j["messages"] = ordered_json::array();
    msgs.push_back({{"role", "user"}, {"content", user_turn()}});
    msgs.push_back({{"role", "assistant"}, {"content", response}});
    return j;
}

void ScholarConfig::validate() const {
    if (extract_model.empty()) throw ConfigError("scholar.extract_model is empty");
    if (refine_model.empty()) throw ConfigError("scholar.refine_model is empty");
    if (!(temperature >= 0.0)) throw ConfigError("scholar.temperature must be >= 0");
    if (max_tokens <= 0) throw ConfigError("scholar.max_tokens must be positive");
    if (min_chars_per_page == 0) throw ConfigError("scholar.min_chars_per_page must be positive");
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0))
        throw ConfigError("scholar.min_confidence must lie in [0, 1]");
    if (jobs == 0) throw ConfigError("scholar.jobs must be positive");
}

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            const auto close = tmpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                const auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
                if (it != values.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

namespace {

// Removes a surrounding Markdown code fence, if any.
std::string strip_fence(std::string_view reply) {
    std::string s = text::trim(reply);
    if (s.rfind("```", 0) != 0) return s;
    const auto nl = s.find('\n');
    if (nl == std::string::npos) return s;
    std::string body = s.substr(nl + 1);
    const auto fence = body.rfind("```");
    if (fence != std::string::npos) body.erase(fence);
    return text::trim(body);
}

}  // namespace

ChatRequest extraction_request(const ExamDoc& doc, const std::vector<std::string>& questions,
                               const ScholarConfig& config) {
    std::string prompt = fill_template(asset("prompts/scholar_extract.txt"), {{"subject", doc.text()}});
    if (!prompt.empty() && prompt.back() != '\n') prompt += '\n';
    prompt += json(questions).dump(2, ' ', false, json::error_handler_t::replace);
    return {config.extract_model, {{Role::User, prompt}}, config.temperature, config.max_tokens};
}

std::vector<QAItem> extract_contexts(const ExamDoc& doc, const std::vector<Segment>& questions,
                                     ChatBackend& gateway, const ScholarConfig& config) {
    std::vector<std::string> texts;
    texts.reserve(questions.size());
    for (const auto& q : questions) texts.push_back(q.text);
    const std::string reply = gateway.complete(extraction_request(doc, texts, config));

    json parsed;
    try {
        parsed = json::parse(strip_fence(reply));
    } catch (const json::exception&) {
        throw QuarantineError(fmt::format("{}: extraction reply is not JSON", doc.doc_id));
    }
    if (!parsed.is_array()) throw QuarantineError(fmt::format("{}: extraction reply is not a JSON list", doc.doc_id));

    struct Entry {
        std::string question, context;
        bool valid = false;
    };
    std::vector<Entry> entries;
    for (const auto& e : parsed) {
        Entry entry;
        if (e.is_object() && e.contains("question") && e["question"].is_string() && e.contains("context") &&
            e["context"].is_string()) {
            entry = {text::trim(e["question"].get<std::string>()), text::trim(e["context"].get<std::string>()), true};
        }
        entries.push_back(std::move(entry));
    }

    std::vector<QAItem> items(questions.size());
    std::vector<bool> used(entries.size(), false);
    std::vector<bool> matched(questions.size(), false);
    for (std::size_t i = 0; i < questions.size(); ++i) {
        items[i].doc_id = doc.doc_id;
        items[i].subject = doc.subject;
        items[i].marker = questions[i].key;
        items[i].question = questions[i].text;
        const std::string want = text::trim(questions[i].text);
        for (std::size_t j = 0; j < entries.size(); ++j) {
            if (!used[j] && entries[j].valid && entries[j].question == want) {
                items[i].context = entries[j].context;
                used[j] = matched[i] = true;
                break;
            }
        }
    }
    for (std::size_t i = 0; i < questions.size(); ++i) {
        if (matched[i]) continue;
        if (i < entries.size() && !used[i] && entries[i].valid) {
            items[i].context = entries[i].context;
            used[i] = true;
            items[i].flags.insert("alignment-fuzzy");
        } else if (entries.size() == questions.size()) {
            items[i].flags.insert("alignment-fuzzy");
        }
    }
    if (entries.size() != questions.size())
        for (auto& item : items) item.flags.insert("count-mismatch");
    return items;
}

ChatRequest refine_request(const QAItem& item, const ScholarConfig& config) {
    const std::string prompt = fill_template(
        asset("prompts/scholar_refine.txt"),
        {{"question", item.question}, {"context", item.context}, {"response", item.response}});
    return {config.refine_model, {{Role::User, prompt}}, config.temperature, config.max_tokens};
}

QAItem refine(QAItem item, ChatBackend& gateway, const ScholarConfig& config,
              std::span<const langid::LanguageProfile> profiles) {
    const std::string reply = gateway.complete(refine_request(item, config));
    json parsed;
    try {
        parsed = json::parse(strip_fence(reply));
    } catch (const json::exception&) {
        throw QuarantineError(fmt::format("{} {}: refinement reply is not JSON", item.doc_id, item.marker));
    }
    for (const char* key : {"question", "context", "reponse"}) {
        if (!parsed.is_object() || !parsed.contains(key) || !parsed[key].is_string())
            throw QuarantineError(
                fmt::format("{} {}: refinement reply lacks string \"{}\"", item.doc_id, item.marker, key));
    }
    item.question = text::trim(parsed["question"].get<std::string>());
    item.context = text::trim(parsed["context"].get<std::string>());
    item.response = text::trim(parsed["reponse"].get<std::string>());

    const auto verdict =
        langid::detect(item.question + "\n" + item.context + "\n" + item.response, profiles, config.min_confidence);
    if (verdict.language != "fr") item.flags.insert("not-french");
    for (const auto* field : {&item.question, &item.context, &item.response})
        if (!latex_balance(*field).balanced) item.flags.insert("latex-unbalanced");
    return item;
}

ordered_json Rejection::to_json() const {
    ordered_json j;
    j["disposition"] = "rejected";
    j["reasons"] = reasons;
    j["item"] = item.to_json();
    return j;
}

namespace {

const std::regex& exercise_reference() {
    static const std::regex re(R"(exercice\s+([0-9]+|[ivx]+)\b)", std::regex::ECMAScript | std::regex::icase);
    return re;
}

bool contradicts(const QAItem& item, const ExerciseIndex& exercises) {
    const auto found = exercises.find(item.doc_id);
    if (found == exercises.end()) return false;
    for (const auto* field : {&item.question, &item.context, &item.response}) {
        for (std::sregex_iterator it(field->begin(), field->end(), exercise_reference()), end; it != end; ++it)
            if (!found->second.count(text::to_lower_ascii((*it)[1].str()))) return true;
    }
    return false;
}

}  // namespace

FilterResult final_filter(std::vector<QAItem> items, const ExerciseIndex& exercises, std::size_t min_response_chars) {
    FilterResult out;
    for (auto& item : items) {
        std::vector<std::string> reasons;
        for (const auto& f : item.flags) reasons.push_back("flag:" + f);
        if (text::trim(item.question).empty() || text::trim(item.context).empty() || text::trim(item.response).empty())
            reasons.emplace_back("missing-data");
        if (text::utf8_length(text::trim(item.response)) < min_response_chars)
            reasons.emplace_back("response-too-short");
        if (contradicts(item, exercises)) reasons.emplace_back("marker-contradiction");
        if (reasons.empty())
            out.kept.push_back(std::move(item));
        else
            out.rejected.push_back({std::move(item), std::move(reasons)});
    }
    return out;
}

std::vector<std::string> validate_record(const json& r) {
    std::vector<std::string> problems;
    if (!r.is_object()) return {"record is not an object"};

    static const std::set<std::string> known{"id",       "source",  "doc_id", "marker",  "subject",
                                             "question", "context", "reponse", "flags", "messages"};
    for (const auto& [k, v] : r.items())
        if (!known.count(k)) problems.push_back(fmt::format("unknown key '{}'", k));

    QAItem item;
    auto need = [&](const char* key, std::string& dst) {
        if (!r.contains(key) || !r[key].is_string()) {
            problems.push_back(fmt::format("'{}' must be a string", key));
        } else if (dst = r[key].get<std::string>(); text::trim(dst).empty()) {
            problems.push_back(fmt::format("'{}' is empty", key));
        }
    };
    need("doc_id", item.doc_id);
    need("subject", item.subject);
    need("question", item.question);
    need("context", item.context);
    need("reponse", item.response);
    if (r.contains("marker") && !r["marker"].is_string()) problems.emplace_back("'marker' must be a string");
    if (r.contains("source") && !r["source"].is_string()) problems.emplace_back("'source' must be a string");
    if (!item.subject.empty() && !is_subject(item.subject))
        problems.push_back(fmt::format("unknown subject '{}'", item.subject));
    if (r.contains("flags") && !(r["flags"].is_array() && r["flags"].empty()))
        problems.emplace_back("emitted records carry no flags");
    for (const auto& [key, value] : {std::pair{"question", &item.question}, std::pair{"context", &item.context},
                                     std::pair{"reponse", &item.response}})
        if (const auto b = latex_balance(*value); !b.balanced)
            problems.push_back(fmt::format("'{}' has unbalanced LaTeX at byte {}", key, b.position));

    const auto& msgs = r.contains("messages") ? r["messages"] : json();
    if (!msgs.is_array() || msgs.size() != 2) {
        problems.emplace_back("'messages' must hold a user and an assistant turn");
    } else {
        auto turn = [&](std::size_t i, const char* role, const std::string& expected) {
            const auto& m = msgs[i];
            if (!m.is_object() || m.value("role", "") != role || !m.contains("content") ||
                !m["content"].is_string())
                problems.push_back(fmt::format("message {} must be a {} turn", i, role));
            else if (m["content"].get<std::string>() != expected)
                problems.push_back(fmt::format("message {} does not match the record fields", i));
        };
        turn(0, "user", item.user_turn());
        turn(1, "assistant", item.response);
    }
    if (r.contains("id") && problems.empty()) {
        if (!r["id"].is_string() || r["id"].get<std::string>() != item.to_conversation().id)
            problems.emplace_back("'id' does not match the content hash");
    }
    return problems;
}

ordered_json DocQuarantine::to_json() const {
    ordered_json j;
    j["disposition"] = "quarantined";
    j["doc_id"] = doc_id;
    j["stage"] = stage;
    j["reason"] = reason;
    j["detail"] = detail;
    j["infrastructure"] = infrastructure;
    if (item) j["item"] = item->to_json();
    return j;
}

bool ScholarResult::infrastructure_failure() const {
    return std::any_of(quarantined.begin(), quarantined.end(), [](const auto& q) { return q.infrastructure; });
}

namespace {

struct Exam {
    std::string key;
    const ExamDoc* subject = nullptr;
    const ExamDoc* solution = nullptr;
};

struct ExamOutcome {
    std::vector<std::string> usable, scanned;
    std::size_t questions = 0;
    std::vector<QAItem> items;
    std::vector<DocQuarantine> quarantined;
    std::size_t extract_quarantined = 0;
    std::size_t refine_input = 0, refine_quarantined = 0;
    std::set<std::string> exercises;
};

ExamOutcome process_exam(const Exam& exam, ChatBackend& gateway, const ScholarConfig& config,
                         std::span<const langid::LanguageProfile> profiles) {
    ExamOutcome out;
    bool usable = true;
    for (const ExamDoc* doc : {exam.subject, exam.solution}) {
        if (!doc) continue;
        if (screen_scanned(*doc, config.min_chars_per_page) == Screen::Scanned) {
            out.scanned.push_back(doc->doc_id);
            usable = false;
        } else {
            out.usable.push_back(doc->doc_id);
        }
    }
    if (!usable) return out;

    const ExamDoc& subject = *exam.subject;
    const auto seg = segment_questions(subject);
    std::vector<Segment> leaves;
    for (const auto& s : seg.segments) {
        if (s.level == 0 && s.key.rfind("exercice ", 0) == 0) out.exercises.insert(s.label);
        if (s.leaf) leaves.push_back(s);
    }
    out.questions = leaves.size();

    try {
        out.items = extract_contexts(subject, leaves, gateway, config);
    } catch (const QuarantineError& e) {
        out.quarantined.push_back({subject.doc_id, "extract", "unparseable-reply", e.what(), false, std::nullopt});
        out.extract_quarantined = leaves.size();
        return out;
    } catch (const GatewayError& e) {
        out.quarantined.push_back({subject.doc_id, "extract", "gateway-error", e.what(), true, std::nullopt});
        out.extract_quarantined = leaves.size();
        return out;
    }
    if (seg.unsegmented)
        for (auto& item : out.items) item.flags.insert("unsegmented");

    if (exam.solution) {
        std::map<std::string, std::deque<std::string>> answers;
        for (const auto& s : segment_questions(*exam.solution).segments) answers[s.key].push_back(s.text);
        for (auto& item : out.items) {
            auto it = answers.find(item.marker);
            if (it == answers.end() || it->second.empty()) continue;
            item.response = std::move(it->second.front());
            it->second.pop_front();
        }
    }

    std::vector<QAItem> refined;
    out.refine_input = out.items.size();
    for (auto& item : out.items) {
        if (text::trim(item.question).empty() || text::trim(item.response).empty()) {
            refined.push_back(std::move(item));  // left for the final filter
            continue;
        }
        try {
            refined.push_back(refine(item, gateway, config, profiles));
        } catch (const QuarantineError& e) {
            out.quarantined.push_back({subject.doc_id, "refine", "unparseable-reply", e.what(), false, item});
            ++out.refine_quarantined;
        } catch (const GatewayError& e) {
            out.quarantined.push_back({subject.doc_id, "refine", "gateway-error", e.what(), true, item});
            ++out.refine_quarantined;
        }
    }
    out.items = std::move(refined);
    return out;
}

}  // namespace

ScholarResult run_scholar(const std::vector<ExamDoc>& docs, ChatBackend& gateway, const ScholarConfig& config,
                          std::span<const langid::LanguageProfile> profiles) {
    config.validate();
    std::map<std::string, Exam> by_key;
    for (const auto& doc : docs) {
        doc.validate();
        auto& exam = by_key[doc.exam];
        exam.key = doc.exam;
        const ExamDoc*& slot = doc.kind == DocKind::SubjectSheet ? exam.subject : exam.solution;
        if (slot)
            throw InputError(fmt::format("exam '{}' has two {}s: {} and {}", doc.exam, kind_name(doc.kind),
                                         slot->doc_id, doc.doc_id));
        slot = &doc;
    }
    std::vector<Exam> exams;
    for (auto& [key, exam] : by_key) {
        if (!exam.subject) throw InputError(fmt::format("exam '{}' has no subject sheet", key));
        exams.push_back(exam);
    }

    const auto outcomes = parallel_map(exams, config.jobs, [&](const Exam& exam) {
        return process_exam(exam, gateway, config, profiles);
    });

    ScholarResult result;
    curate::StageStats screen, extract, refine_stats, filter;
    screen.stage = "screen";
    extract.stage = "extract";
    refine_stats.stage = "refine";
    filter.stage = "filter";
    ExerciseIndex exercises;
    std::vector<QAItem> pending;
    for (std::size_t i = 0; i < exams.size(); ++i) {
        const auto& o = outcomes[i];
        screen.input_count += o.usable.size() + o.scanned.size();
        screen.kept += o.usable.size();
        screen.dropped += o.scanned.size();
        if (!o.scanned.empty()) screen.breakdown["scanned"] += o.scanned.size();
        result.scanned.insert(result.scanned.end(), o.scanned.begin(), o.scanned.end());

        extract.input_count += o.questions;
        extract.quarantined += o.extract_quarantined;
        extract.kept += o.refine_input;
        refine_stats.input_count += o.refine_input;
        refine_stats.quarantined += o.refine_quarantined;
        refine_stats.kept += o.items.size();
        for (const auto& q : o.quarantined) {
            auto& stage = q.stage == "extract" ? extract : refine_stats;
            stage.breakdown[q.reason] += q.stage == "extract" ? o.extract_quarantined : 1;
        }
        result.quarantined.insert(result.quarantined.end(), o.quarantined.begin(), o.quarantined.end());
        exercises[exams[i].subject->doc_id] = o.exercises;
        pending.insert(pending.end(), o.items.begin(), o.items.end());
    }

    filter.input_count = pending.size();
    auto filtered = final_filter(std::move(pending), exercises, config.min_response_chars);
    filter.kept = filtered.kept.size();
    filter.dropped = filtered.rejected.size();
    for (const auto& r : filtered.rejected) ++filter.breakdown[r.reasons.front()];

    for (auto* s : {&screen, &extract, &refine_stats, &filter}) {
        s->check();
        result.stages.push_back(*s);
    }
    result.items = std::move(filtered.kept);
    result.rejected = std::move(filtered.rejected);

    std::vector<Conversation> corpus;
    corpus.reserve(result.items.size());
    for (const auto& item : result.items) {
        auto c = item.to_conversation();
        c.token_count = count_tokens(c, TokenCounter{});
        corpus.push_back(std::move(c));
    }
    result.stats = curate::corpus_stats(corpus);
    return result;
}

}  // namespace luthier::scholar
