#ifndef REGEX_FORGE_TESTS_REFERENCE_MATCHER_HPP
#define REGEX_FORGE_TESTS_REFERENCE_MATCHER_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "regex_forge/ast.hpp"

namespace regex_forge::testing {

// Continuation-passing backtracking matcher written directly over the AST.
// Exponential and unbounded; only for tiny inputs in tests. Shares no code
// with the library's matcher or class handling.
class ReferenceMatcher {
public:
    ReferenceMatcher(const RegexAst& ast, std::u32string input) : ast_(ast), in_(std::move(input)) {
        const auto& root = ast.root;
        if (root.kind == NodeKind::InlineFlags && root.children.empty()) global_ci_ = true;
        if (root.kind == NodeKind::Concat) {
            for (const Node& n : root.children) {
                if (n.kind == NodeKind::InlineFlags && n.children.empty()) global_ci_ = true;
            }
        }
    }

    bool full() {
        Caps caps(static_cast<std::size_t>(ast_.group_count + 1), {-1, -1});
        const int n = static_cast<int>(in_.size());
        return m(ast_.root, 0, caps, global_ci_, [n](int p, Caps&) { return p == n; });
    }

    bool partial() {
        for (int start = 0; start <= static_cast<int>(in_.size()); ++start) {
            Caps caps(static_cast<std::size_t>(ast_.group_count + 1), {-1, -1});
            if (m(ast_.root, start, caps, global_ci_, [](int, Caps&) { return true; })) return true;
        }
        return false;
    }

private:
    using Caps = std::vector<std::pair<int, int>>;
    using Cont = std::function<bool(int, Caps&)>;

    const RegexAst& ast_;
    std::u32string in_;
    bool global_ci_ = false;

    static bool word(char32_t c) {
        return c == '_' || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    }
    static bool digit(char32_t c) { return c >= '0' && c <= '9'; }
    static bool space(char32_t c) { return c == ' ' || (c >= 9 && c <= 13); }
    static char32_t lower(char32_t c) { return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c; }
    static char32_t upper(char32_t c) { return (c >= 'a' && c <= 'z') ? c - ('a' - 'A') : c; }

    static bool shorthand(ShorthandKind k, bool neg, char32_t c) {
        bool r = k == ShorthandKind::Digit ? digit(c) : k == ShorthandKind::Word ? word(c) : space(c);
        return r != neg;
    }

    static bool in_items(const Node& n, char32_t c) {
        for (const ClassItem& it : n.items) {
            if (it.is_shorthand ? shorthand(it.shorthand, it.negated, c) : (c >= it.lo && c <= it.hi)) return true;
        }
        return false;
    }

    static bool char_ok(const Node& n, char32_t c, bool ci) {
        switch (n.kind) {
            case NodeKind::Literal: return ci ? lower(c) == lower(n.codepoint) : c == n.codepoint;
            case NodeKind::Dot: return c != '\n';
            case NodeKind::Shorthand: return shorthand(n.shorthand, n.negated, c);
            case NodeKind::CharClass: {
                bool hit = in_items(n, c) || (ci && (in_items(n, lower(c)) || in_items(n, upper(c))));
                return hit != n.negated;
            }
            default: return false;
        }
    }

    bool word_at(int p) const { return p >= 0 && p < static_cast<int>(in_.size()) && word(in_[static_cast<std::size_t>(p)]); }

    bool rep(const Node& q, int count, int pos, Caps& caps, bool ci, const Cont& k) {
        const Node& body = q.children.front();
        const bool can_more = q.max == kUnbounded || count < q.max;
        auto more = [&]() {
            if (!can_more) return false;
            return m(body, pos, caps, ci, [&](int p, Caps& c) {
                if (q.max == kUnbounded && count >= q.min && p == pos) return false;
                return rep(q, count + 1, p, c, ci, k);
            });
        };
        auto stop = [&]() { return count >= q.min && k(pos, caps); };
        return q.lazy ? (stop() || more()) : (more() || stop());
    }

    bool m(const Node& n, int pos, Caps& caps, bool ci, const Cont& k) {
        const int len = static_cast<int>(in_.size());
        switch (n.kind) {
            case NodeKind::Empty: return k(pos, caps);
            case NodeKind::Concat: return seq(n, 0, pos, caps, ci, k);
            case NodeKind::Alternation:
                for (const Node& b : n.children) {
                    if (m(b, pos, caps, ci, k)) return true;
                }
                return false;
            case NodeKind::Literal:
            case NodeKind::Dot:
            case NodeKind::Shorthand:
            case NodeKind::CharClass:
                return pos < len && char_ok(n, in_[static_cast<std::size_t>(pos)], ci) && k(pos + 1, caps);
            case NodeKind::AnchorStart: return pos == 0 && k(pos, caps);
            case NodeKind::AnchorEnd: return pos == len && k(pos, caps);
            case NodeKind::WordBoundary: return word_at(pos - 1) != word_at(pos) && k(pos, caps);
            case NodeKind::NonWordBoundary: return word_at(pos - 1) == word_at(pos) && k(pos, caps);
            case NodeKind::Quantifier: return rep(n, 0, pos, caps, ci, k);
            case NodeKind::NonCapturingGroup: return m(n.children.front(), pos, caps, ci, k);
            case NodeKind::CaptureGroup:
            case NodeKind::NamedGroup: {
                const auto g = static_cast<std::size_t>(n.group);
                return m(n.children.front(), pos, caps, ci, [&, g, pos](int p, Caps& c) {
                    const auto old = c[g];
                    c[g] = {pos, p};
                    if (k(p, c)) return true;
                    c[g] = old;
                    return false;
                });
            }
            case NodeKind::Backreference: {
                const auto [s, e] = caps[static_cast<std::size_t>(n.group)];
                if (s < 0) return false;
                const int l = e - s;
                if (pos + l > len) return false;
                for (int i = 0; i < l; ++i) {
                    char32_t a = in_[static_cast<std::size_t>(s + i)], b = in_[static_cast<std::size_t>(pos + i)];
                    if (ci ? lower(a) != lower(b) : a != b) return false;
                }
                return k(pos + l, caps);
            }
            case NodeKind::Lookahead:
            case NodeKind::NegativeLookahead:
            case NodeKind::Lookbehind:
            case NodeKind::NegativeLookbehind: {
                const bool behind = n.kind == NodeKind::Lookbehind || n.kind == NodeKind::NegativeLookbehind;
                const bool negative = n.kind == NodeKind::NegativeLookahead || n.kind == NodeKind::NegativeLookbehind;
                Caps inner = caps;
                bool hit = false;
                if (behind) {
                    const int w = width(n.children.front());
                    if (pos - w >= 0) hit = m(n.children.front(), pos - w, inner, ci, [pos](int p, Caps&) { return p == pos; });
                } else {
                    hit = m(n.children.front(), pos, inner, ci, [](int, Caps&) { return true; });
                }
                if (hit == negative) return false;
                if (negative) return k(pos, caps);
                Caps saved = caps;
                caps = inner;
                if (k(pos, caps)) return true;
                caps = saved;
                return false;
            }
            case NodeKind::InlineFlags:
                return n.children.empty() ? k(pos, caps) : m(n.children.front(), pos, caps, true, k);
        }
        return false;
    }

    bool seq(const Node& n, std::size_t i, int pos, Caps& caps, bool ci, const Cont& k) {
        if (i == n.children.size()) return k(pos, caps);
        return m(n.children[i], pos, caps, ci, [&, i](int p, Caps& c) { return seq(n, i + 1, p, c, ci, k); });
    }

    static int width(const Node& n) {
        switch (n.kind) {
            case NodeKind::Literal:
            case NodeKind::Dot:
            case NodeKind::Shorthand:
            case NodeKind::CharClass: return 1;
            case NodeKind::Concat: {
                int w = 0;
                for (const Node& c : n.children) w += width(c);
                return w;
            }
            case NodeKind::Alternation: return width(n.children.front());
            case NodeKind::Quantifier: return n.min * width(n.children.front());
            case NodeKind::CaptureGroup:
            case NodeKind::NamedGroup:
            case NodeKind::NonCapturingGroup: return width(n.children.front());
            case NodeKind::InlineFlags: return n.children.empty() ? 0 : width(n.children.front());
            default: return 0;
        }
    }
};

inline bool reference_full_match(const RegexAst& ast, const std::u32string& input) {
    return ReferenceMatcher(ast, input).full();
}
inline bool reference_partial_match(const RegexAst& ast, const std::u32string& input) {
    return ReferenceMatcher(ast, input).partial();
}

}  // namespace regex_forge::testing

#endif  // REGEX_FORGE_TESTS_REFERENCE_MATCHER_HPP
