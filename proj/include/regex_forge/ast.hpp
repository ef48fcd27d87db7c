#ifndef REGEX_FORGE_AST_HPP
#define REGEX_FORGE_AST_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace regex_forge {

enum class NodeKind : std::uint8_t {
    Empty,
    Concat,
    Alternation,
    Literal,
    Dot,
    CharClass,
    Shorthand,
    AnchorStart,
    AnchorEnd,
    WordBoundary,
    NonWordBoundary,
    Quantifier,
    CaptureGroup,
    NonCapturingGroup,
    NamedGroup,
    Backreference,
    Lookahead,
    NegativeLookahead,
    Lookbehind,
    NegativeLookbehind,
    InlineFlags,
};

enum class ShorthandKind : std::uint8_t { Digit, Word, Space };

/// One member of a bracket expression: either a codepoint range or a
/// shorthand such as \d inside [...].
struct ClassItem {
    bool is_shorthand = false;
    char32_t lo = 0;
    char32_t hi = 0;
    ShorthandKind shorthand = ShorthandKind::Digit;
    bool negated = false;  // \D \W \S

    static ClassItem range(char32_t lo, char32_t hi) { return {false, lo, hi, ShorthandKind::Digit, false}; }
    static ClassItem single(char32_t c) { return range(c, c); }
    static ClassItem escape(ShorthandKind k, bool negated) { return {true, 0, 0, k, negated}; }

    bool operator==(const ClassItem&) const = default;
};

inline constexpr int kUnbounded = -1;

struct Node {
    NodeKind kind = NodeKind::Empty;

    // Literal codepoint; for anchors the spelling ('^', '$', 'A', 'Z').
    char32_t codepoint = 0;

    // CharClass members and negation; Shorthand kind/negation.
    std::vector<ClassItem> items;
    bool negated = false;
    ShorthandKind shorthand = ShorthandKind::Digit;

    // Quantifier bounds, max == kUnbounded for open ranges.
    int min = 0;
    int max = kUnbounded;
    bool lazy = false;

    // Capture index for groups and numbered/named backreferences; name for
    // named groups and named backreferences.
    int group = 0;
    std::string name;

    // InlineFlags: (?i) as a leaf, (?i:...) with one child.
    bool case_insensitive = false;

    std::vector<Node> children;

    bool operator==(const Node&) const = default;
};

struct RegexAst {
    Node root;
    int group_count = 0;
    std::vector<std::string> group_names;  // indexed by group - 1, empty when unnamed

    bool operator==(const RegexAst&) const = default;
};

constexpr bool is_lookaround(NodeKind k) {
    return k == NodeKind::Lookahead || k == NodeKind::NegativeLookahead || k == NodeKind::Lookbehind ||
           k == NodeKind::NegativeLookbehind;
}

constexpr bool is_group(NodeKind k) {
    return k == NodeKind::CaptureGroup || k == NodeKind::NonCapturingGroup || k == NodeKind::NamedGroup;
}

constexpr bool is_assertion(NodeKind k) {
    return k == NodeKind::AnchorStart || k == NodeKind::AnchorEnd || k == NodeKind::WordBoundary ||
           k == NodeKind::NonWordBoundary || is_lookaround(k);
}

constexpr std::string_view node_kind_name(NodeKind k) {
    constexpr std::array<std::string_view, 21> names = {
        "empty",          "concat",         "alternation",         "literal",      "dot",
        "char-class",     "shorthand",      "anchor-start",        "anchor-end",   "word-boundary",
        "non-word-boundary", "quantifier",  "capture-group",       "non-capturing-group",
        "named-group",    "backreference",  "lookahead",           "negative-lookahead",
        "lookbehind",     "negative-lookbehind", "inline-flags"};
    return names[static_cast<std::size_t>(k)];
}

/// Pre-order visit of every node.
template <typename Fn>
void for_each_node(const Node& node, Fn&& fn) {
    fn(node);
    for (const Node& child : node.children) for_each_node(child, fn);
}

inline std::size_t node_count(const Node& node) {
    std::size_t n = 0;
    for_each_node(node, [&](const Node&) { ++n; });
    return n;
}

inline std::size_t ast_depth(const Node& node) {
    std::size_t d = 0;
    for (const Node& child : node.children) d = std::max(d, ast_depth(child));
    return d + 1;
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_AST_HPP
