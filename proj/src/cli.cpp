// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include "luthier/cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "luthier/config.hpp"
#include "luthier/curate.hpp"
#include "luthier/error.hpp"
#include "luthier/hash.hpp"
#include "luthier/langid.hpp"
#include "luthier/manifest.hpp"
#include "luthier/merge.hpp"
#include "luthier/pack.hpp"
#include "luthier/scholar.hpp"
#include "luthier/tensor_archive.hpp"

namespace luthier::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

const json* lookup_field(const json& doc, std::string_view path) {
    const json* cur = &doc;
    std::size_t i = 0;
    while (i < path.size()) {
        if (path[i] == '.') {
            ++i;
            continue;
        }
        if (path[i] == '[') {
            const auto close = path.find(']', i);
            if (close == std::string_view::npos) return nullptr;
            std::size_t idx = 0;
            const auto digits = path.substr(i + 1, close - i - 1);
            const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
            if (ec != std::errc{} || p != digits.data() + digits.size()) return nullptr;
            if (!cur->is_array() || idx >= cur->size()) return nullptr;
            cur = &(*cur)[idx];
            i = close + 1;
            continue;
        }
        const auto end = path.find_first_of(".[", i);
        const std::string key(path.substr(i, end == std::string_view::npos ? std::string_view::npos : end - i));
        if (!cur->is_object() || !cur->contains(key)) return nullptr;
        cur = &(*cur)[key];
        i = end == std::string_view::npos ? path.size() : end;
    }
    return cur;
}

namespace {

class Logger {
public:
    explicit Logger(std::ostream& err) : err_(err) {}

    void log(std::string_view level, std::string_view event, ordered_json fields = ordered_json::object()) {
        ordered_json j;
        j["ts"] = utc_timestamp();
        j["level"] = level;
        j["event"] = event;
        for (auto& [k, v] : fields.items()) j[k] = v;
        std::lock_guard lock(mu_);
        err_ << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }

private:
    std::ostream& err_;
    std::mutex mu_;
};

struct Context {
    std::ostream& out;
    Logger log;
    RunManifest manifest;
    fs::path manifest_path = "luthier.manifest.json";
};

void write_lines(const fs::path& path, const std::vector<std::string>& lines, RunManifest& manifest) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(fmt::format("cannot write {}", tmp.string()));
        for (const auto& l : lines) out << l << '\n';
        if (!out) throw IoError(fmt::format("cannot write {}", tmp.string()));
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError(fmt::format("cannot move {} into place: {}", path.string(), ec.message()));
    manifest.outputs.push_back(path.string());
}

template <class Range>
std::vector<std::string> dump_lines(const Range& records) {
    std::vector<std::string> lines;
    for (const auto& r : records) lines.push_back(r.to_json().dump(-1, ' ', false, json::error_handler_t::replace));
    return lines;
}

fs::path with_suffix(const fs::path& p, std::string_view suffix) {
    fs::path out = p;
    out += suffix;
    return out;
}

Config load_config_into(const std::string& path, RunManifest& manifest) {
    if (path.empty()) return Config{};
    manifest.add_input(path);
    Config cfg = load_config(path);
    manifest.config_sha256 = manifest.inputs.back().sha256;
    return cfg;
}

// ---- merge ----

struct MergeOptions {
    std::string config, base, ft, out, report, method, policy;
    std::optional<double> alpha;
    unsigned jobs = 0;
};

int do_merge(Context& ctx, const MergeOptions& o) {
    Config cfg = load_config_into(o.config, ctx.manifest);
    MergeJob job = cfg.merge;
    if (!o.base.empty()) job.base = o.base;
    if (!o.ft.empty()) job.fine_tuned = o.ft;
    if (!o.out.empty()) job.output = o.out;
    if (!o.report.empty()) job.report = o.report;
    if (!o.method.empty()) {
        const auto m = parse_method(o.method);
        if (!m) throw ConfigError(fmt::format("unknown merge method '{}' (expected linear or slerp)", o.method));
        job.spec.method = *m;
    }
    if (!o.policy.empty()) {
        const auto p = parse_policy(o.policy);
        if (!p) throw ConfigError(fmt::format("unknown mismatch policy '{}'", o.policy));
        job.spec.mismatch_policy = *p;
    }
    if (o.alpha) job.spec.alpha = *o.alpha;
    if (!job.base) throw InputError("merge needs a base archive (--base or merge.base)");
    if (!job.fine_tuned) throw InputError("merge needs a fine-tuned archive (--ft or merge.fine_tuned)");
    if (!job.output) throw InputError("merge needs an output path (--out or merge.output)");
    job.spec.validate();
    ctx.manifest_path = with_suffix(*job.output, ".manifest.json");

    ctx.manifest.add_input(*job.base);
    ctx.manifest.add_input(*job.fine_tuned);
    const auto base = TensorArchive::open(*job.base);
    const auto ft = TensorArchive::open(*job.fine_tuned);
    ctx.log.log("info", "merge.start", {{"tensors", base.size()}, {"method", method_name(job.spec.method)},
                                        {"alpha", job.spec.alpha}});
    const unsigned jobs = o.jobs ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
    const auto report = merge_archives(base, ft, job.spec, *job.output, jobs);
    ctx.manifest.outputs.push_back(job.output->string());

    const fs::path report_path = job.report.value_or(with_suffix(*job.output, ".report.jsonl"));
    std::vector<std::string> lines;
    std::istringstream jsonl(report.to_jsonl());
    for (std::string l; std::getline(jsonl, l);) lines.push_back(l);
    write_lines(report_path, lines, ctx.manifest);

    std::size_t fallbacks = 0;
    for (const auto& t : report.tensors) fallbacks += t.fallback ? 1 : 0;
    ctx.out << fmt::format("merged {} tensors ({} lerp fallbacks) into {}\n", report.tensors.size(), fallbacks,
                           job.output->string());
    ctx.out << fmt::format("report: {}\n", report_path.string());
    return kOk;
}

// ---- curate ----

struct GatewayOptions {
    std::string cache_mode, cache_dir;
};

GatewayConfig resolve_gateway(GatewayConfig g, const GatewayOptions& o) {
    g.apply_environment();
    if (!o.cache_mode.empty()) {
        const auto m = parse_cache_mode(o.cache_mode);
        if (!m) throw ConfigError(fmt::format("unknown cache mode '{}' (expected off, record or replay)", o.cache_mode));
        g.cache_mode = *m;
    }
    if (!o.cache_dir.empty()) g.cache_dir = o.cache_dir;
    g.validate();
    return g;
}

struct CurateOptions {
    std::string config, out, quarantine, stats;
    std::vector<std::string> inputs, translate_sources;
    GatewayOptions gateway;
    unsigned jobs = 0;
};

int do_curate(Context& ctx, const CurateOptions& o) {
    Config cfg = load_config_into(o.config, ctx.manifest);
    if (!o.translate_sources.empty()) cfg.curate.translate_sources = o.translate_sources;
    if (o.jobs) cfg.curate.jobs = o.jobs;
    cfg.curate.validate();
    const auto gateway_cfg = resolve_gateway(cfg.gateway, o.gateway);

    std::vector<fs::path> paths(o.inputs.begin(), o.inputs.end());
    for (const auto& p : paths) ctx.manifest.add_input(p);
    auto ingested = curate::ingest(paths);
    for (const auto& s : ingested.skipped) ctx.log.log("warn", "curate.malformed_line", {{"detail", s}});
    ctx.manifest.stages.push_back(ingested.stats);

    const auto gateway = make_gateway(gateway_cfg);
    ctx.log.log("info", "curate.start", {{"conversations", ingested.conversations.size()}});
    auto result = curate::run_pipeline(std::move(ingested.conversations), *gateway, cfg.curate,
                                       langid::builtin_profiles());
    for (const auto& s : result.stages) {
        ctx.manifest.stages.push_back(s);
        ctx.out << fmt::format("{:<12} in {:>6}  kept {:>6}  dropped {:>6}  quarantined {:>6}\n", s.stage,
                               s.input_count, s.kept, s.dropped, s.quarantined);
    }

    write_lines(o.out, dump_lines(result.output), ctx.manifest);
    write_lines(o.quarantine.empty() ? with_suffix(o.out, ".quarantine.jsonl") : fs::path(o.quarantine),
                dump_lines(result.quarantine), ctx.manifest);
    write_lines(o.stats.empty() ? with_suffix(o.out, ".stats.json") : fs::path(o.stats),
                {result.stats.to_json().dump(2)}, ctx.manifest);
    ctx.out << fmt::format("wrote {} conversations ({} tokens) to {}\n", result.stats.sample_count,
                           result.stats.token_total, o.out);
    if (result.infrastructure_failure()) {
        ctx.log.log("error", "curate.infrastructure_failure", {{"quarantined", result.quarantine.size()}});
        ctx.manifest.error = "gateway failures; see the quarantine file";
        return kInfrastructure;
    }
    return kOk;
}

// ---- scholar ----

struct ScholarOptions {
    std::string config, in, out, rejects, stats;
    GatewayOptions gateway;
    unsigned jobs = 0;
};

int do_scholar(Context& ctx, const ScholarOptions& o) {
    Config cfg = load_config_into(o.config, ctx.manifest);
    if (o.jobs) cfg.scholar.jobs = o.jobs;
    cfg.scholar.validate();
    const auto gateway_cfg = resolve_gateway(cfg.gateway, o.gateway);

    const auto docs = scholar::load_exam_dir(o.in);
    for (const auto& d : docs) {
        ctx.manifest.add_input(fs::path(o.in) / (d.doc_id + ".pages.jsonl"));
        ctx.manifest.add_input(fs::path(o.in) / (d.doc_id + ".meta.json"));
    }
    const auto gateway = make_gateway(gateway_cfg);
    ctx.log.log("info", "scholar.start", {{"documents", docs.size()}});
    const auto result = scholar::run_scholar(docs, *gateway, cfg.scholar, langid::builtin_profiles());
    for (const auto& s : result.stages) {
        ctx.manifest.stages.push_back(s);
        ctx.out << fmt::format("{:<8} in {:>6}  kept {:>6}  dropped {:>6}  quarantined {:>6}\n", s.stage,
                               s.input_count, s.kept, s.dropped, s.quarantined);
    }

    std::vector<std::string> rejects;
    for (const auto& id : result.scanned)
        rejects.push_back(ordered_json{{"disposition", "scanned"}, {"doc_id", id}}.dump());
    for (auto& l : dump_lines(result.quarantined)) rejects.push_back(std::move(l));
    for (auto& l : dump_lines(result.rejected)) rejects.push_back(std::move(l));

    write_lines(o.out, dump_lines(result.items), ctx.manifest);
    write_lines(o.rejects.empty() ? with_suffix(o.out, ".rejects.jsonl") : fs::path(o.rejects), rejects, ctx.manifest);
    write_lines(o.stats.empty() ? with_suffix(o.out, ".stats.json") : fs::path(o.stats),
                {result.stats.to_json().dump(2)}, ctx.manifest);
    ctx.out << fmt::format("wrote {} items to {}\n", result.items.size(), o.out);
    if (result.infrastructure_failure()) {
        ctx.manifest.error = "gateway failures; see the rejects file";
        return kInfrastructure;
    }
    return kOk;
}

// ---- pack / stats ----

std::vector<Conversation> read_corpus(Context& ctx, const std::vector<std::string>& inputs) {
    std::vector<fs::path> paths(inputs.begin(), inputs.end());
    for (const auto& p : paths) ctx.manifest.add_input(p);
    auto ingested = curate::ingest(paths);
    for (const auto& s : ingested.skipped) ctx.log.log("warn", "malformed_line", {{"detail", s}});
    ctx.manifest.stages.push_back(ingested.stats);
    return std::move(ingested.conversations);
}

struct PackOptions {
    std::string config, out, report, counter;
    std::vector<std::string> inputs;
    std::optional<std::uint64_t> capacity;
};

int do_pack(Context& ctx, const PackOptions& o) {
    Config cfg = load_config_into(o.config, ctx.manifest);
    if (o.capacity) cfg.pack.capacity = *o.capacity;
    if (!o.counter.empty()) cfg.pack.counter = TokenCounter::parse(o.counter);
    if (cfg.pack.capacity == 0) throw ConfigError("pack capacity must be positive");
    cfg.pack.counter.validate();

    std::vector<PackItem> items;
    for (const auto& c : read_corpus(ctx, o.inputs)) items.push_back({c.id, count_tokens(c, cfg.pack.counter)});
    const auto batches = pack_ffd(std::move(items), cfg.pack.capacity);
    const auto report = pack_report(batches);
    write_lines(o.out, dump_lines(batches), ctx.manifest);
    if (!o.report.empty()) write_lines(o.report, {report.to_json().dump(2)}, ctx.manifest);
    ctx.out << fmt::format("packed {} samples ({} tokens) into {} batches of {}; mean utilization {:.4f}\n",
                           report.sample_count, report.total_tokens, report.batch_count, cfg.pack.capacity,
                           report.mean_utilization.value_or(0.0));
    return kOk;
}

struct StatsOptions {
    std::string out, counter;
    std::vector<std::string> inputs;
};

int do_stats(Context& ctx, const StatsOptions& o) {
    const TokenCounter counter = o.counter.empty() ? TokenCounter{} : TokenCounter::parse(o.counter);
    auto corpus = read_corpus(ctx, o.inputs);
    for (auto& c : corpus)
        if (!c.token_count) c.token_count = count_tokens(c, counter);
    const auto stats = curate::corpus_stats(corpus);
    const std::string text = stats.to_json().dump(2);
    if (o.out.empty())
        ctx.out << text << '\n';
    else
        write_lines(o.out, {text}, ctx.manifest);
    return kOk;
}

// ---- langid ----

struct LangidOptions {
    std::string text, input, field = "messages[0].content", out, build_profile, lang;
    std::optional<double> min_confidence;
    std::string config;
};

int do_langid(Context& ctx, const LangidOptions& o) {
    Config cfg = load_config_into(o.config, ctx.manifest);
    const double min_conf = o.min_confidence.value_or(cfg.langid.min_confidence);
    if (!(min_conf >= 0.0 && min_conf <= 1.0)) throw ConfigError("--min-confidence must lie in [0, 1]");

    const int modes = !o.text.empty() + !o.input.empty() + !o.build_profile.empty();
    if (modes != 1) throw InputError("langid needs exactly one of --text, --input or --build-profile");

    if (!o.build_profile.empty()) {
        if (o.lang.empty() || o.out.empty()) throw InputError("--build-profile needs --lang and --out");
        ctx.manifest.add_input(o.build_profile);
        std::ifstream in(o.build_profile, std::ios::binary);
        if (!in) throw InputError(fmt::format("cannot read corpus '{}'", o.build_profile));
        std::stringstream ss;
        ss << in.rdbuf();
        const auto profile = langid::build_profile(ss.str(), o.lang);
        std::vector<std::string> lines;
        std::istringstream ser(profile.serialize());
        for (std::string l; std::getline(ser, l);) lines.push_back(l);
        write_lines(o.out, lines, ctx.manifest);
        ctx.out << fmt::format("wrote {}-trigram '{}' profile to {}\n", profile.size(), o.lang, o.out);
        return kOk;
    }

    const auto& profiles = langid::builtin_profiles();
    auto verdict_json = [](const langid::LanguageVerdict& v) {
        return ordered_json{{"language", v.language}, {"confidence", v.confidence}};
    };
    if (!o.text.empty()) {
        ctx.out << verdict_json(langid::detect(o.text, profiles, min_conf)).dump() << '\n';
        return kOk;
    }

    ctx.manifest.add_input(o.input);
    std::ifstream in(o.input, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot read input file '{}'", o.input));
    std::vector<std::string> lines;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError(fmt::format("{}:{}: invalid JSON ({})", o.input, n, e.what()));
        }
        const json* field = lookup_field(doc, o.field);
        if (!field || !field->is_string())
            throw InputError(fmt::format("{}:{}: field '{}' missing or not a string", o.input, n, o.field));
        auto j = verdict_json(langid::detect(field->get<std::string>(), profiles, min_conf));
        ordered_json rec{{"line", n}};
        for (auto& [k, v] : j.items()) rec[k] = v;
        lines.push_back(rec.dump());
    }
    if (o.out.empty())
        for (const auto& l : lines) ctx.out << l << '\n';
    else
        write_lines(o.out, lines, ctx.manifest);
    return kOk;
}

int exit_code_for(const std::exception_ptr& ep, Context& ctx) {
    auto record = [&](std::string_view kind, const std::exception& e, int code) {
        ctx.log.log("error", "run.failed", {{"kind", kind}, {"message", e.what()}, {"exit_code", code}});
        ctx.manifest.error = e.what();
        return code;
    };
    try {
        std::rethrow_exception(ep);
    } catch (const ConfigError& e) {
        return record("config", e, kInputError);
    } catch (const InputError& e) {
        return record("input", e, kInputError);
    } catch (const GatewayError& e) {
        return record("gateway", e, kInfrastructure);
    } catch (const IoError& e) {
        return record("io", e, kInfrastructure);
    } catch (const std::exception& e) {
        return record("internal", e, kInfrastructure);
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context ctx{out, Logger(err), {}};
    ctx.manifest.argv = args;
    ctx.manifest.version = LUTHIER_VERSION;
    ctx.manifest.started_at = utc_timestamp();

    CLI::App app{"luthier: French instruction-data curation and model merging toolkit", "luthier"};
    app.set_version_flag("--version", LUTHIER_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    std::string manifest_override;
    app.add_option("--manifest", manifest_override, "Where to write the run manifest");

    MergeOptions mo;
    auto* merge = app.add_subcommand("merge", "Interpolate a base and a fine-tuned checkpoint (linear or slerp)");
    merge->add_option("--config", mo.config, "TOML config with a [merge] section")->check(CLI::ExistingFile);
    merge->add_option("--base", mo.base, "Base model archive");
    merge->add_option("--ft", mo.ft, "Fine-tuned model archive");
    merge->add_option("--out", mo.out, "Output archive");
    merge->add_option("--method", mo.method, "linear or slerp");
    merge->add_option("--alpha", mo.alpha, "Fine-tuned share in [0, 1]");
    merge->add_option("--policy", mo.policy, "Name mismatch policy: error or take_fine_tuned");
    merge->add_option("--report", mo.report, "Per-tensor JSONL report (default <out>.report.jsonl)");
    merge->add_option("--jobs", mo.jobs, "Worker threads (default: hardware concurrency)");

    CurateOptions co;
    auto* curate = app.add_subcommand("curate", "Filter, translate, regenerate and judge conversations");
    curate->add_option("--config", co.config, "TOML config")->check(CLI::ExistingFile);
    curate->add_option("--in", co.inputs, "Input JSONL files")->required();
    curate->add_option("--out", co.out, "Output JSONL")->required();
    curate->add_option("--quarantine", co.quarantine, "Quarantine JSONL (default <out>.quarantine.jsonl)");
    curate->add_option("--stats", co.stats, "Corpus statistics JSON (default <out>.stats.json)");
    curate->add_option("--translate-source", co.translate_sources, "Source whose English items are translated");
    curate->add_option("--cache-mode", co.gateway.cache_mode, "off, record or replay");
    curate->add_option("--cache-dir", co.gateway.cache_dir, "Record/replay cache directory");
    curate->add_option("--jobs", co.jobs, "Concurrent conversations");

    ScholarOptions so;
    auto* scholar = app.add_subcommand("scholar", "Build question-answer items from exam texts");
    scholar->add_option("--config", so.config, "TOML config")->check(CLI::ExistingFile);
    scholar->add_option("--in", so.in, "Directory of {doc_id}.pages.jsonl and {doc_id}.meta.json")->required();
    scholar->add_option("--out", so.out, "Output JSONL")->required();
    scholar->add_option("--rejects", so.rejects, "Rejected and quarantined records (default <out>.rejects.jsonl)");
    scholar->add_option("--stats", so.stats, "Subject distribution JSON (default <out>.stats.json)");
    scholar->add_option("--cache-mode", so.gateway.cache_mode, "off, record or replay");
    scholar->add_option("--cache-dir", so.gateway.cache_dir, "Record/replay cache directory");
    scholar->add_option("--jobs", so.jobs, "Concurrent exams");

    PackOptions po;
    auto* pack = app.add_subcommand("pack", "First-fit-decreasing sequence packing");
    pack->add_option("--config", po.config, "TOML config with a [pack] section")->check(CLI::ExistingFile);
    pack->add_option("--in", po.inputs, "Corpus JSONL files")->required();
    pack->add_option("--out", po.out, "Packed batches JSONL")->required();
    pack->add_option("--capacity", po.capacity, "Tokens per batch (default 16384)");
    pack->add_option("--counter", po.counter, "byte:<bytes per token> or precomputed");
    pack->add_option("--report", po.report, "Utilization report JSON");

    LangidOptions lo;
    auto* langid = app.add_subcommand("langid", "Detect French/English or build a trigram profile");
    langid->add_option("--config", lo.config, "TOML config with a [langid] section")->check(CLI::ExistingFile);
    langid->add_option("--text", lo.text, "Text to classify");
    langid->add_option("--input", lo.input, "JSONL file to classify line by line");
    langid->add_option("--field", lo.field, "Field path within each line")->capture_default_str();
    langid->add_option("--min-confidence", lo.min_confidence, "Below this the verdict is und");
    langid->add_option("--build-profile", lo.build_profile, "Corpus text file to build a profile from");
    langid->add_option("--lang", lo.lang, "Language code for --build-profile");
    langid->add_option("--out", lo.out, "Output file");

    StatsOptions sto;
    auto* stats = app.add_subcommand("stats", "Source and subject distribution of a corpus");
    stats->add_option("--in", sto.inputs, "Corpus JSONL files")->required();
    stats->add_option("--out", sto.out, "Output JSON (default: stdout)");
    stats->add_option("--counter", sto.counter, "Token counter for items without token_count");

    std::vector<char*> argv;
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    int code = kOk;
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        ctx.log.log("error", "run.failed", {{"kind", "usage"}, {"message", e.what()}, {"exit_code", 1}});
        ctx.manifest.error = e.what();
        code = kInputError;
    }

    if (code == kOk) {
        const auto* sub = app.get_subcommands().front();
        ctx.manifest.command = sub->get_name();
        std::string primary_out = sub == merge     ? mo.out
                                  : sub == curate  ? co.out
                                  : sub == scholar ? so.out
                                  : sub == pack    ? po.out
                                  : sub == langid  ? lo.out
                                                   : sto.out;
        if (!primary_out.empty()) ctx.manifest_path = with_suffix(primary_out, ".manifest.json");
        try {
            if (sub == merge) code = do_merge(ctx, mo);
            else if (sub == curate) code = do_curate(ctx, co);
            else if (sub == scholar) code = do_scholar(ctx, so);
            else if (sub == pack) code = do_pack(ctx, po);
            else if (sub == langid) code = do_langid(ctx, lo);
            else if (sub == stats) code = do_stats(ctx, sto);
        } catch (...) {
            code = exit_code_for(std::current_exception(), ctx);
        }
    }

    ctx.manifest.exit_code = code;
    ctx.manifest.finished_at = utc_timestamp();
    const fs::path manifest_path = manifest_override.empty() ? ctx.manifest_path : fs::path(manifest_override);
    try {
        ctx.manifest.write(manifest_path);
    } catch (const std::exception& e) {
        ctx.log.log("error", "manifest.failed", {{"path", manifest_path.string()}, {"message", e.what()}});
        if (code == kOk) code = kInfrastructure;
    }
    return code;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace luthier::cli
