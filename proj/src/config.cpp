// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include "luthier/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/core.h>
#include <toml.hpp>

#include "luthier/error.hpp"

namespace luthier {

std::optional<std::string> suggest_key(std::string_view key, const std::set<std::string>& candidates) {
    auto distance = [](std::string_view a, std::string_view b) {
        std::vector<std::size_t> row(b.size() + 1);
        for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
        for (std::size_t i = 1; i <= a.size(); ++i) {
            std::size_t diag = row[0];
            row[0] = i;
            for (std::size_t j = 1; j <= b.size(); ++j) {
                const std::size_t up = row[j];
                row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
                diag = up;
            }
        }
        return row[b.size()];
    };
    std::optional<std::string> best;
    std::size_t best_d = std::max<std::size_t>(2, key.size() / 3) + 1;
    for (const auto& c : candidates) {
        const auto d = distance(key, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

namespace {

class Section {
public:
    Section(const toml::table& table, std::string name, std::string_view source, const std::filesystem::path& base_dir)
        : table_(table), name_(std::move(name)), source_(source), base_dir_(base_dir) {}

    // Registers a handler per key; unknown keys fail in finish().
    void on(const std::string& key, std::function<void(const toml::node&)> fn) { handlers_[key] = std::move(fn); }

    void string(const std::string& key, std::string& dst) {
        on(key, [this, key, &dst](const toml::node& n) {
            if (!n.is_string()) fail(key, n, "must be a string");
            dst = *n.value<std::string>();
        });
    }
    void path(const std::string& key, std::optional<std::filesystem::path>& dst) {
        on(key, [this, key, &dst](const toml::node& n) { dst = to_path(key, n); });
    }
    void path(const std::string& key, std::filesystem::path& dst) {
        on(key, [this, key, &dst](const toml::node& n) { dst = to_path(key, n); });
    }
    void number(const std::string& key, double& dst) {
        on(key, [this, key, &dst](const toml::node& n) {
            if (!n.is_number()) fail(key, n, "must be a number");
            dst = *n.value<double>();
        });
    }
    template <class Int>
    void integer(const std::string& key, Int& dst) {
        on(key, [this, key, &dst](const toml::node& n) {
            if (!n.is_integer()) fail(key, n, "must be an integer");
            const auto v = *n.value<std::int64_t>();
            if (v < 0) fail(key, n, "must not be negative");
            dst = static_cast<Int>(v);
        });
    }

    [[noreturn]] void fail(const std::string& key, const toml::node& n, std::string_view what) const {
        throw ConfigError(fmt::format("{}:{}: {}.{} {}", source_, n.source().begin.line, name_, key, what));
    }

    void finish() const {
        std::set<std::string> known;
        for (const auto& [k, _] : handlers_) known.insert(k);
        for (auto&& [k, node] : table_) {
            const std::string key(k.str());
            const auto h = handlers_.find(key);
            if (h == handlers_.end()) {
                if (key == "api_key")
                    throw ConfigError(fmt::format("{}:{}: {}.api_key is not accepted in config files; set LUTHIER_API_KEY",
                                                  source_, node.source().begin.line, name_));
                const auto hint = suggest_key(key, known);
                throw ConfigError(fmt::format("{}:{}: unknown key '{}.{}'{}", source_, node.source().begin.line, name_,
                                              key, hint ? fmt::format(" (did you mean '{}'?)", *hint) : ""));
            }
            h->second(node);
        }
    }

    const std::string& name() const { return name_; }

private:
    std::filesystem::path to_path(const std::string& key, const toml::node& n) const {
        if (!n.is_string()) fail(key, n, "must be a path string");
        std::filesystem::path p(*n.value<std::string>());
        if (p.empty()) fail(key, n, "must not be empty");
        return p.is_relative() && !base_dir_.empty() ? base_dir_ / p : p;
    }

    const toml::table& table_;
    std::string name_;
    std::string_view source_;
    const std::filesystem::path& base_dir_;
    std::map<std::string, std::function<void(const toml::node&)>> handlers_;
};

template <class T, class Parse>
void parse_enum(Section& s, const std::string& key, T& dst, Parse parse, std::string_view allowed) {
    s.on(key, [&s, key, &dst, parse, allowed](const toml::node& n) {
        const auto v = n.is_string() ? parse(*n.value<std::string>()) : std::nullopt;
        if (!v) s.fail(key, n, fmt::format("must be one of {}", allowed));
        dst = *v;
    });
}

void counter_key(Section& s, const std::string& key, TokenCounter& dst) {
    s.on(key, [&s, key, &dst](const toml::node& n) {
        if (!n.is_string()) s.fail(key, n, "must be a string such as \"byte:3.2\"");
        try {
            dst = TokenCounter::parse(*n.value<std::string>());
        } catch (const InputError& e) {
            s.fail(key, n, e.what());
        }
    });
}

void parse_merge(const toml::table& t, std::string_view source, const std::filesystem::path& dir, MergeJob& job) {
    Section s(t, "merge", source, dir);
    s.path("base", job.base);
    s.path("fine_tuned", job.fine_tuned);
    s.path("output", job.output);
    s.path("report", job.report);
    parse_enum(s, "method", job.spec.method, parse_method, "linear, slerp");
    s.number("alpha", job.spec.alpha);
    parse_enum(s, "mismatch_policy", job.spec.mismatch_policy, parse_policy, "error, take_fine_tuned");
    s.number("parallel_fallback_epsilon", job.spec.parallel_fallback_epsilon);
    // Overrides without method or alpha inherit the global values, which
    // may be declared after them.
    std::vector<std::pair<std::optional<MergeMethod>, std::optional<double>>> inherited;
    s.on("overrides", [&](const toml::node& n) {
        const auto* arr = n.as_array();
        if (!arr || !arr->is_array_of_tables()) s.fail("overrides", n, "must be an array of tables ([[merge.overrides]])");
        for (std::size_t i = 0; i < arr->size(); ++i) {
            MergeOverride o;
            MergeMethod method{};
            double alpha = 0.0;
            bool has_pattern = false, has_method = false, has_alpha = false;
            Section os(*arr->get(i)->as_table(), fmt::format("merge.overrides[{}]", i), source, dir);
            os.on("pattern", [&](const toml::node& p) {
                if (!p.is_string()) os.fail("pattern", p, "must be a string");
                o.pattern = *p.value<std::string>();
                has_pattern = true;
            });
            os.on("method", [&](const toml::node& p) {
                const auto m = p.is_string() ? parse_method(*p.value<std::string>()) : std::nullopt;
                if (!m) os.fail("method", p, "must be one of linear, slerp");
                method = *m;
                has_method = true;
            });
            os.on("alpha", [&](const toml::node& p) {
                if (!p.is_number()) os.fail("alpha", p, "must be a number");
                alpha = *p.value<double>();
                has_alpha = true;
            });
            os.finish();
            if (!has_pattern) throw ConfigError(fmt::format("{}: merge.overrides[{}] needs a pattern", source, i));
            inherited.emplace_back(has_method ? std::optional(method) : std::nullopt,
                                   has_alpha ? std::optional(alpha) : std::nullopt);
            job.spec.overrides.push_back(std::move(o));
        }
    });
    s.finish();
    for (std::size_t i = 0; i < inherited.size(); ++i) {
        job.spec.overrides[i].method = inherited[i].first.value_or(job.spec.method);
        job.spec.overrides[i].alpha = inherited[i].second.value_or(job.spec.alpha);
    }
}

}  // namespace

void Config::validate() const {
    merge.spec.validate();
    curate.validate();
    scholar.validate();
    if (!(langid.min_confidence >= 0.0 && langid.min_confidence <= 1.0))
        throw ConfigError("langid.min_confidence must lie in [0, 1]");
    if (pack.capacity == 0) throw ConfigError("pack.capacity must be positive");
    pack.counter.validate();
    if (gateway.max_concurrent == 0) throw ConfigError("gateway.max_concurrent must be positive");
    if (gateway.backoff_base_ms <= 0) throw ConfigError("gateway.backoff_base_ms must be positive");
    if (gateway.timeout_s <= 0) throw ConfigError("gateway.timeout_s must be positive");
    if (gateway.cache_mode != CacheMode::Off && gateway.cache_dir.empty())
        throw ConfigError("gateway.cache_dir is required when cache_mode is record or replay");
}

Config parse_config(std::string_view document, std::string_view source_name, const std::filesystem::path& base_dir) {
    toml::table root;
    try {
        root = toml::parse(document, source_name);
    } catch (const toml::parse_error& e) {
        throw ConfigError(fmt::format("{}:{}: {}", source_name, e.source().begin.line, e.description()));
    }

    Config cfg;
    static const std::set<std::string> kSections{"merge", "gateway", "curate", "langid", "scholar", "pack"};
    for (auto&& [k, node] : root) {
        const std::string name(k.str());
        if (!kSections.count(name)) {
            const auto hint = suggest_key(name, kSections);
            throw ConfigError(fmt::format("{}:{}: unknown section '{}'{}", source_name, node.source().begin.line, name,
                                          hint ? fmt::format(" (did you mean '{}'?)", *hint) : ""));
        }
        if (!node.is_table())
            throw ConfigError(fmt::format("{}:{}: '{}' must be a table", source_name, node.source().begin.line, name));
        cfg.sections.insert(name);
    }

    // [langid] first: it supplies the default confidence for curate and scholar.
    if (const auto* t = root["langid"].as_table()) {
        Section s(*t, "langid", source_name, base_dir);
        s.number("min_confidence", cfg.langid.min_confidence);
        s.finish();
    }
    cfg.curate.min_confidence = cfg.langid.min_confidence;
    cfg.scholar.min_confidence = cfg.langid.min_confidence;

    if (const auto* t = root["merge"].as_table()) parse_merge(*t, source_name, base_dir, cfg.merge);

    if (const auto* t = root["gateway"].as_table()) {
        auto& g = cfg.gateway;
        Section s(*t, "gateway", source_name, base_dir);
        s.string("base_url", g.base_url);
        s.integer("max_concurrent", g.max_concurrent);
        s.integer("retry_max", g.retry_max);
        s.integer("backoff_base_ms", g.backoff_base_ms);
        s.integer("timeout_s", g.timeout_s);
        parse_enum(s, "cache_mode", g.cache_mode, parse_cache_mode, "off, record, replay");
        s.path("cache_dir", g.cache_dir);
        s.finish();
    }

    if (const auto* t = root["curate"].as_table()) {
        auto& c = cfg.curate;
        Section s(*t, "curate", source_name, base_dir);
        s.string("translate_model", c.translate_model);
        s.string("generate_model", c.generate_model);
        s.string("judge_model", c.judge_model);
        s.number("translate_temperature", c.translate_temperature);
        s.number("generate_temperature", c.generate_temperature);
        s.number("judge_temperature", c.judge_temperature);
        s.integer("max_tokens", c.max_tokens);
        s.integer("judge_max_tokens", c.judge_max_tokens);
        s.number("min_confidence", c.min_confidence);
        s.integer("jobs", c.jobs);
        counter_key(s, "counter", c.counter);
        s.on("translate_sources", [&](const toml::node& n) {
            const auto* arr = n.as_array();
            if (!arr) s.fail("translate_sources", n, "must be an array of strings");
            c.translate_sources.clear();
            for (const auto& item : *arr) {
                if (!item.is_string()) s.fail("translate_sources", n, "must be an array of strings");
                c.translate_sources.push_back(*item.value<std::string>());
            }
        });
        s.finish();
    }

    if (const auto* t = root["scholar"].as_table()) {
        auto& c = cfg.scholar;
        Section s(*t, "scholar", source_name, base_dir);
        s.string("extract_model", c.extract_model);
        s.string("refine_model", c.refine_model);
        s.number("temperature", c.temperature);
        s.integer("max_tokens", c.max_tokens);
        s.integer("min_chars_per_page", c.min_chars_per_page);
        s.integer("min_response_chars", c.min_response_chars);
        s.number("min_confidence", c.min_confidence);
        s.integer("jobs", c.jobs);
        s.finish();
    }

    if (const auto* t = root["pack"].as_table()) {
        Section s(*t, "pack", source_name, base_dir);
        s.integer("capacity", cfg.pack.capacity);
        counter_key(s, "counter", cfg.pack.counter);
        s.finish();
    }

    cfg.validate();
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot read config {}", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string(), path.parent_path());
}

}  // namespace luthier
