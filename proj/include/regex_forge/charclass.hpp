#ifndef REGEX_FORGE_CHARCLASS_HPP
#define REGEX_FORGE_CHARCLASS_HPP

#include <algorithm>
#include <vector>

#include "regex_forge/ast.hpp"
#include "regex_forge/unicode.hpp"

namespace regex_forge {

inline constexpr char32_t kMaxCodepoint = 0x10FFFF;

struct CodeRange {
    char32_t lo = 0;
    char32_t hi = 0;
    bool operator==(const CodeRange&) const = default;
};

/// Sorted, disjoint, non-adjacent codepoint ranges.
using RangeSet = std::vector<CodeRange>;

inline RangeSet normalize_ranges(RangeSet ranges) {
    std::sort(ranges.begin(), ranges.end(), [](const CodeRange& a, const CodeRange& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    RangeSet out;
    for (const CodeRange& r : ranges) {
        if (!out.empty() && r.lo <= out.back().hi + 1) {
            out.back().hi = std::max(out.back().hi, r.hi);
        } else {
            out.push_back(r);
        }
    }
    return out;
}

inline RangeSet complement_ranges(const RangeSet& ranges) {
    RangeSet out;
    char32_t next = 0;
    for (const CodeRange& r : ranges) {
        if (r.lo > next) out.push_back({next, r.lo - 1});
        next = r.hi + 1;
    }
    if (ranges.empty() || ranges.back().hi < kMaxCodepoint) out.push_back({next, kMaxCodepoint});
    return out;
}

inline bool ranges_contain(const RangeSet& ranges, char32_t c) {
    auto it = std::upper_bound(ranges.begin(), ranges.end(), c,
                               [](char32_t v, const CodeRange& r) { return v < r.lo; });
    if (it == ranges.begin()) return false;
    --it;
    return c <= it->hi;
}

inline RangeSet shorthand_ranges(ShorthandKind kind, bool negated) {
    RangeSet base;
    switch (kind) {
        case ShorthandKind::Digit: base = {{'0', '9'}}; break;
        case ShorthandKind::Word: base = {{'0', '9'}, {'A', 'Z'}, {'_', '_'}, {'a', 'z'}}; break;
        case ShorthandKind::Space: base = {{'\t', '\r'}, {' ', ' '}}; break;
    }
    return negated ? complement_ranges(base) : base;
}

/// Adds the other ASCII case of every letter in the set.
inline RangeSet fold_ranges(const RangeSet& ranges) {
    RangeSet out = ranges;
    for (const CodeRange& r : ranges) {
        const char32_t ulo = std::max<char32_t>(r.lo, 'A'), uhi = std::min<char32_t>(r.hi, 'Z');
        if (ulo <= uhi) out.push_back({ulo + 32, uhi + 32});
        const char32_t llo = std::max<char32_t>(r.lo, 'a'), lhi = std::min<char32_t>(r.hi, 'z');
        if (llo <= lhi) out.push_back({llo - 32, lhi - 32});
    }
    return normalize_ranges(std::move(out));
}

/// Members of a class item list before negation.
inline RangeSet item_ranges(const std::vector<ClassItem>& items) {
    RangeSet out;
    for (const ClassItem& item : items) {
        if (item.is_shorthand) {
            const RangeSet sh = shorthand_ranges(item.shorthand, item.negated);
            out.insert(out.end(), sh.begin(), sh.end());
        } else {
            out.push_back({item.lo, item.hi});
        }
    }
    return normalize_ranges(std::move(out));
}

/// Codepoints a single-character node accepts (literal, dot, class, shorthand).
/// Case folding is applied before negation, matching how negated sets behave
/// under (?i).
inline RangeSet node_ranges(const Node& node, bool case_insensitive) {
    switch (node.kind) {
        case NodeKind::Literal: {
            RangeSet r = {{node.codepoint, node.codepoint}};
            return case_insensitive ? fold_ranges(r) : r;
        }
        case NodeKind::Dot: return {{0, '\n' - 1}, {'\n' + 1, kMaxCodepoint}};
        case NodeKind::Shorthand: {
            RangeSet r = shorthand_ranges(node.shorthand, false);
            if (case_insensitive) r = fold_ranges(r);
            return node.negated ? complement_ranges(r) : r;
        }
        case NodeKind::CharClass: {
            RangeSet r = item_ranges(node.items);
            if (case_insensitive) r = fold_ranges(r);
            return node.negated ? complement_ranges(r) : r;
        }
        default: return {};
    }
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_CHARCLASS_HPP
