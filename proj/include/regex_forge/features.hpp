#ifndef REGEX_FORGE_FEATURES_HPP
#define REGEX_FORGE_FEATURES_HPP

#include <array>
#include <bitset>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regex_forge/ast.hpp"
#include "regex_forge/unicode.hpp"

namespace regex_forge {

enum class FeatureKind : std::uint8_t {
    Literal,
    Dot,
    CharClass,
    NegatedClass,
    ShorthandClass,
    AnchorStart,
    AnchorEnd,
    WordBoundary,
    QuantifierStar,
    QuantifierPlus,
    QuantifierOptional,
    QuantifierBounded,
    LazyModifier,
    Alternation,
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

inline constexpr std::size_t kFeatureKindCount = 23;

constexpr std::string_view feature_name(FeatureKind f) {
    constexpr std::array<std::string_view, kFeatureKindCount> names = {
        "literal",           "dot",           "char-class",          "negated-class",      "shorthand-class",
        "anchor-start",      "anchor-end",    "word-boundary",       "quantifier-star",    "quantifier-plus",
        "quantifier-optional", "quantifier-bounded", "lazy-modifier", "alternation",       "capture-group",
        "non-capturing-group", "named-group", "backreference",       "lookahead",          "negative-lookahead",
        "lookbehind",        "negative-lookbehind", "inline-flags"};
    return names[static_cast<std::size_t>(f)];
}

/// Set of construct kinds; iteration order follows the enum.
class FeatureSet {
public:
    void insert(FeatureKind f) { bits_.set(static_cast<std::size_t>(f)); }
    bool contains(FeatureKind f) const { return bits_.test(static_cast<std::size_t>(f)); }
    std::size_t size() const { return bits_.count(); }
    bool empty() const { return bits_.none(); }
    bool subset_of(const FeatureSet& other) const { return (bits_ & ~other.bits_).none(); }
    FeatureSet& operator|=(const FeatureSet& other) {
        bits_ |= other.bits_;
        return *this;
    }
    std::vector<FeatureKind> kinds() const {
        std::vector<FeatureKind> out;
        for (std::size_t k = 0; k < kFeatureKindCount; ++k) {
            if (bits_.test(k)) out.push_back(static_cast<FeatureKind>(k));
        }
        return out;
    }
    bool operator==(const FeatureSet&) const = default;

private:
    std::bitset<kFeatureKindCount> bits_;
};

/// Construct kind of a single node; concatenation and empty nodes are
/// structural and have none. A lazy quantifier also carries LazyModifier,
/// reported by node_features.
inline std::optional<FeatureKind> feature_of(const Node& node) {
    switch (node.kind) {
        case NodeKind::Empty:
        case NodeKind::Concat: return std::nullopt;
        case NodeKind::Alternation: return FeatureKind::Alternation;
        case NodeKind::Literal: return FeatureKind::Literal;
        case NodeKind::Dot: return FeatureKind::Dot;
        case NodeKind::CharClass: return node.negated ? FeatureKind::NegatedClass : FeatureKind::CharClass;
        case NodeKind::Shorthand: return FeatureKind::ShorthandClass;
        case NodeKind::AnchorStart: return FeatureKind::AnchorStart;
        case NodeKind::AnchorEnd: return FeatureKind::AnchorEnd;
        case NodeKind::WordBoundary:
        case NodeKind::NonWordBoundary: return FeatureKind::WordBoundary;
        case NodeKind::Quantifier:
            switch (node.codepoint) {
                case '*': return FeatureKind::QuantifierStar;
                case '+': return FeatureKind::QuantifierPlus;
                case '?': return FeatureKind::QuantifierOptional;
                default: return FeatureKind::QuantifierBounded;
            }
        case NodeKind::CaptureGroup: return FeatureKind::CaptureGroup;
        case NodeKind::NonCapturingGroup: return FeatureKind::NonCapturingGroup;
        case NodeKind::NamedGroup: return FeatureKind::NamedGroup;
        case NodeKind::Backreference: return FeatureKind::Backreference;
        case NodeKind::Lookahead: return FeatureKind::Lookahead;
        case NodeKind::NegativeLookahead: return FeatureKind::NegativeLookahead;
        case NodeKind::Lookbehind: return FeatureKind::Lookbehind;
        case NodeKind::NegativeLookbehind: return FeatureKind::NegativeLookbehind;
        case NodeKind::InlineFlags: return FeatureKind::InlineFlags;
    }
    return std::nullopt;
}

inline FeatureSet feature_set(const Node& node) {
    FeatureSet out;
    for_each_node(node, [&](const Node& n) {
        if (const auto f = feature_of(n)) out.insert(*f);
        if (n.kind == NodeKind::Quantifier && n.lazy) out.insert(FeatureKind::LazyModifier);
    });
    return out;
}

inline FeatureSet feature_set(const RegexAst& ast) { return feature_set(ast.root); }

inline std::size_t feature_count(const RegexAst& ast) { return feature_set(ast).size(); }

/// Length of the pattern text in Unicode scalar values.
inline std::size_t pattern_length(std::string_view pattern) { return scalar_count(pattern); }

enum class RegularityClass : std::uint8_t { Regular, Extended };

constexpr std::string_view regularity_name(RegularityClass r) {
    return r == RegularityClass::Regular ? "regular" : "extended";
}

/// Extended iff a backreference or lookaround occurs anywhere in the tree.
inline RegularityClass classify_regularity(const RegexAst& ast) {
    bool extended = false;
    for_each_node(ast.root, [&](const Node& n) {
        if (n.kind == NodeKind::Backreference || is_lookaround(n.kind)) extended = true;
    });
    return extended ? RegularityClass::Extended : RegularityClass::Regular;
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_FEATURES_HPP
