// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include "luthier/merge.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include <fnmatch.h>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "luthier/error.hpp"
#include "luthier/parallel.hpp"

namespace luthier {

std::string_view method_name(MergeMethod m) noexcept {
    return m == MergeMethod::Linear ? "linear" : "slerp";
}

std::optional<MergeMethod> parse_method(std::string_view s) noexcept {
    if (s == "linear" || s == "lerp") return MergeMethod::Linear;
    if (s == "slerp") return MergeMethod::Slerp;
    return std::nullopt;
}

std::string_view policy_name(MismatchPolicy p) noexcept {
    return p == MismatchPolicy::Error ? "error" : "take_fine_tuned";
}

std::optional<MismatchPolicy> parse_policy(std::string_view s) noexcept {
    if (s == "error") return MismatchPolicy::Error;
    if (s == "take_fine_tuned") return MismatchPolicy::TakeFineTuned;
    return std::nullopt;
}

bool glob_is_valid(std::string_view pattern) {
    if (pattern.empty()) return false;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] == '\\') {
            if (++i >= pattern.size()) return false;
        } else if (pattern[i] == '[') {
            std::size_t j = i + 1;
            if (j < pattern.size() && (pattern[j] == '!' || pattern[j] == '^')) ++j;
            if (j < pattern.size() && pattern[j] == ']') ++j;
            while (j < pattern.size() && pattern[j] != ']') ++j;
            if (j >= pattern.size()) return false;
            i = j;
        }
    }
    return true;
}

bool glob_match(std::string_view pattern, std::string_view name) {
    return ::fnmatch(std::string(pattern).c_str(), std::string(name).c_str(), 0) == 0;
}

void MergeSpec::validate() const {
    auto check_alpha = [](double a, std::string_view where) {
        if (!(a >= 0.0 && a <= 1.0))
            throw ConfigError(fmt::format("{}alpha = {} is outside the [0, 1] bound", where, a));
    };
    check_alpha(alpha, "");
    if (!(parallel_fallback_epsilon > 0.0) || !std::isfinite(parallel_fallback_epsilon))
        throw ConfigError(fmt::format("parallel_fallback_epsilon = {} must be > 0", parallel_fallback_epsilon));
    for (const auto& o : overrides) {
        if (!glob_is_valid(o.pattern)) throw ConfigError(fmt::format("override pattern '{}' is not a valid glob", o.pattern));
        check_alpha(o.alpha, fmt::format("override '{}': ", o.pattern));
    }
}

std::pair<MergeMethod, double> MergeSpec::resolve(std::string_view tensor_name) const {
    for (const auto& o : overrides)
        if (glob_match(o.pattern, tensor_name)) return {o.method, o.alpha};
    return {method, alpha};
}

namespace {

void check_inputs(std::span<const float> w0, std::span<const float> w1, std::string_view name) {
    const std::string_view label = name.empty() ? std::string_view("<buffer>") : name;
    if (w0.size() != w1.size())
        throw InputError(fmt::format("tensor '{}': length mismatch ({} vs {})", label, w0.size(), w1.size()));
    for (std::size_t i = 0; i < w0.size(); ++i) {
        if (!std::isfinite(w0[i]))
            throw InputError(fmt::format("tensor '{}': non-finite base value at index {}", label, i));
        if (!std::isfinite(w1[i]))
            throw InputError(fmt::format("tensor '{}': non-finite fine-tuned value at index {}", label, i));
    }
}

std::vector<float> lerp_unchecked(std::span<const float> w0, std::span<const float> w1, double alpha) {
    std::vector<float> out(w0.size());
    const double a0 = 1.0 - alpha;
    for (std::size_t i = 0; i < w0.size(); ++i)
        out[i] = static_cast<float>(a0 * static_cast<double>(w0[i]) + alpha * static_cast<double>(w1[i]));
    return out;
}

}  // namespace

std::vector<float> lerp(std::span<const float> w0, std::span<const float> w1, double alpha,
                        std::string_view tensor_name) {
    check_inputs(w0, w1, tensor_name);
    return lerp_unchecked(w0, w1, alpha);
}

SlerpResult slerp(std::span<const float> w0, std::span<const float> w1, double alpha, double epsilon,
                  std::string_view tensor_name) {
    check_inputs(w0, w1, tensor_name);
    if (w0.empty())
        throw InputError(fmt::format("tensor '{}': slerp needs at least one element", tensor_name));

    double dot = 0.0, n0 = 0.0, n1 = 0.0;
    for (std::size_t i = 0; i < w0.size(); ++i) {
        const double a = w0[i], b = w1[i];
        dot += a * b;
        n0 += a * a;
        n1 += b * b;
    }
    SlerpResult r;
    if (n0 == 0.0 || n1 == 0.0) {
        r.values = lerp_unchecked(w0, w1, alpha);
        r.fallback = true;
        return r;
    }
    const double cos_theta = std::clamp(dot / (std::sqrt(n0) * std::sqrt(n1)), -1.0, 1.0);
    r.theta = std::acos(cos_theta);
    const double sin_theta = std::sin(r.theta);
    if (sin_theta < epsilon) {
        r.values = lerp_unchecked(w0, w1, alpha);
        r.fallback = true;
        return r;
    }
    const double c0 = std::sin((1.0 - alpha) * r.theta) / sin_theta;
    const double c1 = std::sin(alpha * r.theta) / sin_theta;
    r.values.resize(w0.size());
    for (std::size_t i = 0; i < w0.size(); ++i)
        r.values[i] = static_cast<float>(c0 * static_cast<double>(w0[i]) + c1 * static_cast<double>(w1[i]));
    return r;
}

std::string MergeReport::to_jsonl() const {
    std::string out;
    for (const auto& t : tensors) {
        nlohmann::ordered_json j;
        j["name"] = t.name;
        j["method"] = method_name(t.method);
        j["alpha"] = t.alpha;
        j["theta"] = t.theta ? nlohmann::ordered_json(*t.theta) : nlohmann::ordered_json(nullptr);
        j["fallback"] = t.fallback;
        j["max_abs_delta_from_base"] = t.max_abs_delta_from_base;
        if (t.copied_from) j["copied_from"] = *t.copied_from;
        out += j.dump();
        out += '\n';
    }
    return out;
}

namespace {

struct Plan {
    std::string name;
    enum class Source { Both, BaseOnly, FineTunedOnly } source = Source::Both;
};

double max_abs_delta(std::span<const float> merged, std::span<const float> base) {
    double m = 0.0;
    for (std::size_t i = 0; i < merged.size(); ++i)
        m = std::max(m, std::abs(static_cast<double>(merged[i]) - static_cast<double>(base[i])));
    return m;
}

}  // namespace

MergeReport merge_archives(const TensorArchive& base, const TensorArchive& fine_tuned, const MergeSpec& spec,
                           const std::filesystem::path& out, unsigned jobs) {
    spec.validate();

    std::vector<Plan> plan;
    std::vector<std::string> base_only, ft_only;
    for (const auto& name : base.names()) {
        if (!fine_tuned.contains(name)) {
            base_only.push_back(name);
            plan.push_back({name, Plan::Source::BaseOnly});
            continue;
        }
        const auto& mb = base.meta(name);
        const auto& mf = fine_tuned.meta(name);
        if (mb.dtype != mf.dtype)
            throw InputError(fmt::format("tensor '{}': dtype mismatch ({} vs {})", name, dtype_name(mb.dtype),
                                         dtype_name(mf.dtype)));
        if (mb.shape != mf.shape)
            throw InputError(fmt::format("tensor '{}': shape mismatch ({} vs {})", name,
                                         nlohmann::json(mb.shape).dump(), nlohmann::json(mf.shape).dump()));
        plan.push_back({name, Plan::Source::Both});
    }
    for (const auto& name : fine_tuned.names()) {
        if (!base.contains(name)) {
            ft_only.push_back(name);
            plan.push_back({name, Plan::Source::FineTunedOnly});
        }
    }
    if (spec.mismatch_policy == MismatchPolicy::Error && (!base_only.empty() || !ft_only.empty())) {
        std::string msg = "tensor name sets differ:";
        if (!base_only.empty()) msg += fmt::format(" only in base: {};", nlohmann::json(base_only).dump());
        if (!ft_only.empty()) msg += fmt::format(" only in fine-tuned: {};", nlohmann::json(ft_only).dump());
        throw InputError(msg);
    }

    std::vector<ArchiveEntry> layout;
    layout.reserve(plan.size());
    for (const auto& p : plan) {
        const auto& m = p.source == Plan::Source::FineTunedOnly ? fine_tuned.meta(p.name) : base.meta(p.name);
        layout.push_back({p.name, m.dtype, m.shape});
    }
    ArchiveWriter writer(out, std::move(layout), base.metadata());

    MergeReport report;
    report.tensors.resize(plan.size());
    const std::size_t window = std::max(1u, jobs) * 2;
    std::vector<std::vector<std::byte>> results;
    for (std::size_t start = 0; start < plan.size(); start += window) {
        const std::size_t count = std::min(window, plan.size() - start);
        results.assign(count, {});
        parallel_for(count, jobs, [&](std::size_t k) {
            const auto& p = plan[start + k];
            auto& rec = report.tensors[start + k];
            rec.name = p.name;
            if (p.source != Plan::Source::Both) {
                const bool from_base = p.source == Plan::Source::BaseOnly;
                rec.method = MergeMethod::Linear;
                rec.alpha = from_base ? 0.0 : 1.0;
                rec.copied_from = from_base ? "base" : "fine_tuned";
                results[k] = (from_base ? base : fine_tuned).read(p.name).bytes;
                return;
            }
            const auto [method, alpha] = spec.resolve(p.name);
            rec.method = method;
            rec.alpha = alpha;
            const auto tb = base.read(p.name);
            const auto w0 = tb.to_f32();
            const auto w1 = fine_tuned.read(p.name).to_f32();
            if (w0.empty()) {
                if (method == MergeMethod::Slerp) {
                    rec.theta = 0.0;
                    rec.fallback = true;
                }
                return;
            }
            std::vector<float> merged;
            if (method == MergeMethod::Linear) {
                merged = lerp(w0, w1, alpha, p.name);
            } else {
                auto s = slerp(w0, w1, alpha, spec.parallel_fallback_epsilon, p.name);
                rec.theta = s.theta;
                rec.fallback = s.fallback;
                merged = std::move(s.values);
            }
            results[k] = narrow_from_f32(merged, tb.meta.dtype);
            rec.max_abs_delta_from_base = max_abs_delta(widen_to_f32(results[k], tb.meta.dtype), w0);
        });
        for (std::size_t k = 0; k < count; ++k) writer.append(plan[start + k].name, results[k]);
    }
    writer.commit();
    return report;
}

}  // namespace luthier
