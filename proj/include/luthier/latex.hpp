// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string_view>

namespace luthier {

struct LatexBalance {
    bool balanced = true;
    /// Byte offset of the offending delimiter when unbalanced: the closer that
    /// has no match, or the innermost opener left open at the end.
    std::size_t position = 0;

    static LatexBalance ok() { return {}; }
    static LatexBalance at(std::size_t pos) { return {false, pos}; }
    bool operator==(const LatexBalance&) const = default;
};

/**
 * Checks pairing of `{}`, `[]`, `\left`/`\right` and `$`/`$$` math shifts.
 *
 * Control symbols (`\{`, `\}`, `\$`, `\%`, `\[`, `\\`, ...) are inert, as are
 * `\verb` arguments and `%` comments up to the end of the line. The delimiter
 * following `\left` or `\right` is consumed with it. Math may open inside a
 * brace group (`\text{... $x$ ...}`), but a closer must always match the most
 * recent opener.
 */
LatexBalance latex_balance(std::string_view text);

}  // namespace luthier
