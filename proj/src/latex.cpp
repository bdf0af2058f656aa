// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include "luthier/latex.hpp"

#include <cctype>
#include <vector>

namespace luthier {

namespace {

enum class Open { Brace, Bracket, Left, Inline, Display };

struct Frame {
    Open kind;
    std::size_t pos;
};

bool is_alpha(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

// Skips the delimiter after \left or \right, starting at `i`.
std::size_t skip_delimiter(std::string_view s, std::size_t i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i >= s.size()) return i;
    if (s[i] != '\\') return i + 1;
    ++i;
    if (i < s.size() && is_alpha(s[i])) {
        while (i < s.size() && is_alpha(s[i])) ++i;
        return i;
    }
    return i + 1;
}

}  // namespace

LatexBalance latex_balance(std::string_view s) {
    std::vector<Frame> stack;
    auto close = [&](Open kind, std::size_t pos) {
        if (stack.empty() || stack.back().kind != kind) return false;
        stack.pop_back();
        (void)pos;
        return true;
    };

    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '%') {
            while (i < s.size() && s[i] != '\n') ++i;
            continue;
        }
        if (c == '\\') {
            const std::size_t start = i++;
            if (i >= s.size()) break;
            if (!is_alpha(s[i])) {
                ++i;  // control symbol
                continue;
            }
            std::size_t j = i;
            while (j < s.size() && is_alpha(s[j])) ++j;
            const std::string_view word = s.substr(i, j - i);
            i = j;
            if (word == "verb") {
                if (i < s.size() && s[i] == '*') ++i;
                if (i >= s.size()) break;
                const char delim = s[i++];
                const auto end = s.find(delim, i);
                i = end == std::string_view::npos ? s.size() : end + 1;
            } else if (word == "left") {
                stack.push_back({Open::Left, start});
                i = skip_delimiter(s, i);
            } else if (word == "right") {
                if (!close(Open::Left, start)) return LatexBalance::at(start);
                i = skip_delimiter(s, i);
            }
            continue;
        }
        switch (c) {
        case '{': stack.push_back({Open::Brace, i}); break;
        case '[': stack.push_back({Open::Bracket, i}); break;
        case '}':
            if (!close(Open::Brace, i)) return LatexBalance::at(i);
            break;
        case ']':
            if (!close(Open::Bracket, i)) return LatexBalance::at(i);
            break;
        case '$': {
            const bool dbl = i + 1 < s.size() && s[i + 1] == '$';
            if (!stack.empty() && stack.back().kind == Open::Inline) {
                stack.pop_back();
            } else if (!stack.empty() && stack.back().kind == Open::Display) {
                if (!dbl) return LatexBalance::at(i);
                stack.pop_back();
                ++i;
            } else if (dbl) {
                stack.push_back({Open::Display, i});
                ++i;
            } else {
                stack.push_back({Open::Inline, i});
            }
            break;
        }
        default: break;
        }
        ++i;
    }
    if (!stack.empty()) return LatexBalance::at(stack.back().pos);
    return LatexBalance::ok();
}

}  // namespace luthier
