#ifndef REGEX_FORGE_PREFILTER_HPP
#define REGEX_FORGE_PREFILTER_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regex_forge/ast.hpp"
#include "regex_forge/matcher.hpp"
#include "regex_forge/unicode.hpp"

namespace regex_forge {

/// Conservative facts about every string a pattern can match: substrings that
/// must occur in it and bounds on its length in scalars.
struct PatternFacts {
    std::vector<std::string> required_literals;  // UTF-8
    std::size_t min_length = 0;
    std::optional<std::size_t> max_length;  // absent = unbounded
};

namespace detail {

struct LiteralInfo {
    std::size_t min = 0;
    std::optional<std::size_t> max = 0;
    std::optional<std::u32string> exact;  // the node matches exactly this string
    std::vector<std::u32string> required;
};

inline std::optional<std::size_t> add_bound(std::optional<std::size_t> a, std::optional<std::size_t> b) {
    if (!a || !b) return std::nullopt;
    return *a + *b;
}

class FactAnalyzer {
public:
    LiteralInfo analyze(const Node& node, bool ci) {
        LiteralInfo info;
        switch (node.kind) {
            case NodeKind::Empty:
            case NodeKind::AnchorStart:
            case NodeKind::AnchorEnd:
            case NodeKind::WordBoundary:
            case NodeKind::NonWordBoundary:
            case NodeKind::Lookahead:
            case NodeKind::NegativeLookahead:
            case NodeKind::Lookbehind:
            case NodeKind::NegativeLookbehind:
                info.exact = std::u32string();
                return info;
            case NodeKind::InlineFlags:
                if (node.children.empty()) {
                    info.exact = std::u32string();
                    return info;
                }
                return analyze(node.children[0], node.case_insensitive || ci);
            case NodeKind::Literal:
                info.min = 1;
                info.max = 1;
                if (!ci || ascii_lower(node.codepoint) == ascii_upper(node.codepoint)) {
                    info.exact = std::u32string(1, node.codepoint);
                }
                return info;
            case NodeKind::Dot:
            case NodeKind::CharClass:
            case NodeKind::Shorthand:
                info.min = 1;
                info.max = 1;
                return info;
            case NodeKind::Backreference:
                info.max = std::nullopt;
                return info;
            case NodeKind::CaptureGroup:
            case NodeKind::NonCapturingGroup:
            case NodeKind::NamedGroup: return analyze(node.children[0], ci);
            case NodeKind::Concat: return concat(node, ci);
            case NodeKind::Alternation: return alternation(node, ci);
            case NodeKind::Quantifier: return quantifier(node, ci);
        }
        return info;
    }

private:
    static void keep(std::vector<std::u32string>& out, const std::u32string& s) {
        if (!s.empty()) out.push_back(s);
    }

    LiteralInfo concat(const Node& node, bool ci) {
        LiteralInfo info;
        info.exact = std::u32string();
        std::u32string run;
        for (const Node& child : node.children) {
            LiteralInfo c = analyze(child, ci);
            info.min += c.min;
            info.max = add_bound(info.max, c.max);
            if (c.exact) {
                run += *c.exact;
                if (info.exact) *info.exact += *c.exact;
            } else {
                keep(info.required, run);
                run.clear();
                info.exact.reset();
            }
            info.required.insert(info.required.end(), c.required.begin(), c.required.end());
        }
        keep(info.required, run);
        return info;
    }

    LiteralInfo alternation(const Node& node, bool ci) {
        LiteralInfo info;
        bool first = true;
        for (const Node& child : node.children) {
            LiteralInfo c = analyze(child, ci);
            std::vector<std::u32string> theirs = c.required;
            if (c.exact) keep(theirs, *c.exact);
            if (first) {
                info = std::move(c);
                info.required = std::move(theirs);
                first = false;
                continue;
            }
            info.min = std::min(info.min, c.min);
            info.max = (info.max && c.max) ? std::optional(std::max(*info.max, *c.max)) : std::nullopt;
            if (!(info.exact && c.exact && *info.exact == *c.exact)) info.exact.reset();
            std::vector<std::u32string> common;
            for (const auto& r : info.required) {
                if (std::find(theirs.begin(), theirs.end(), r) != theirs.end()) common.push_back(r);
            }
            info.required = std::move(common);
        }
        return info;
    }

    LiteralInfo quantifier(const Node& node, bool ci) {
        const LiteralInfo c = analyze(node.children[0], ci);
        LiteralInfo info;
        const auto lo = static_cast<std::size_t>(node.min);
        info.min = c.min * lo;
        if (node.max == kUnbounded) {
            info.max = (c.max && *c.max == 0) ? std::optional<std::size_t>(0) : std::nullopt;
        } else if (c.max) {
            info.max = *c.max * static_cast<std::size_t>(node.max);
        } else {
            info.max = node.max == 0 ? std::optional<std::size_t>(0) : std::nullopt;
        }
        if (lo == 0) {
            if (node.max == 0) info.exact = std::u32string();
            return info;
        }
        info.required = c.required;
        if (c.exact) {
            std::u32string rep;
            for (std::size_t k = 0; k < lo && rep.size() <= 256; ++k) rep += *c.exact;
            if (node.max == node.min && rep.size() == c.exact->size() * lo) info.exact = rep;
            keep(info.required, rep.size() == c.exact->size() * lo ? rep : *c.exact);
        }
        return info;
    }
};

}  // namespace detail

inline PatternFacts pattern_facts(const RegexAst& ast) {
    bool global_ci = false;
    for_each_node(ast.root, [&](const Node& n) {
        if (n.kind == NodeKind::InlineFlags && n.children.empty()) global_ci = true;
    });
    detail::LiteralInfo info = detail::FactAnalyzer().analyze(ast.root, global_ci);
    PatternFacts facts;
    facts.min_length = info.min;
    facts.max_length = info.max;
    if (info.exact) info.required.push_back(*info.exact);
    std::sort(info.required.begin(), info.required.end());
    info.required.erase(std::unique(info.required.begin(), info.required.end()), info.required.end());
    for (const auto& r : info.required) {
        if (!r.empty()) facts.required_literals.push_back(to_utf8(r));
    }
    return facts;
}

/// Query-side hints: the positives every candidate must match.
struct QueryHints {
    std::vector<std::string> positives;
    MatchMode mode = MatchMode::Partial;
};

/// False only when no string matched by the pattern can satisfy every
/// positive. Never rules out a pattern that could match.
inline bool may_satisfy(const PatternFacts& facts, const QueryHints& hints) {
    for (const std::string& x : hints.positives) {
        if (!try_to_u32(x)) continue;  // lossy decoding; byte search would be unsound
        const std::size_t len = scalar_count(x);
        if (len < facts.min_length) return false;
        if (hints.mode == MatchMode::Full && facts.max_length && len > *facts.max_length) return false;
        for (const std::string& lit : facts.required_literals) {
            if (x.find(lit) == std::string::npos) return false;
        }
    }
    return true;
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_PREFILTER_HPP
