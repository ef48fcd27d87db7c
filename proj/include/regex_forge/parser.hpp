#ifndef REGEX_FORGE_PARSER_HPP
#define REGEX_FORGE_PARSER_HPP

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regex_forge/ast.hpp"
#include "regex_forge/unicode.hpp"

namespace regex_forge {

enum class ParseErrorCode {
    Syntax,
    UnbalancedGroup,
    InvalidRange,
    InvalidQuantifier,
    NothingToRepeat,
    MultipleRepeat,
    InvalidEscape,
    InvalidGroupReference,
    LookbehindNotFixedWidth,
    InvalidUtf8,
    Unsupported,
};

constexpr std::string_view parse_error_code_name(ParseErrorCode c) {
    switch (c) {
        case ParseErrorCode::Syntax: return "syntax";
        case ParseErrorCode::UnbalancedGroup: return "unbalanced-group";
        case ParseErrorCode::InvalidRange: return "invalid-range";
        case ParseErrorCode::InvalidQuantifier: return "invalid-quantifier";
        case ParseErrorCode::NothingToRepeat: return "nothing-to-repeat";
        case ParseErrorCode::MultipleRepeat: return "multiple-repeat";
        case ParseErrorCode::InvalidEscape: return "invalid-escape";
        case ParseErrorCode::InvalidGroupReference: return "invalid-group-reference";
        case ParseErrorCode::LookbehindNotFixedWidth: return "lookbehind-not-fixed-width";
        case ParseErrorCode::InvalidUtf8: return "invalid-utf8";
        case ParseErrorCode::Unsupported: return "unsupported";
    }
    return "syntax";
}

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorCode code, std::size_t offset, const std::string& reason)
        : std::runtime_error(reason + " at offset " + std::to_string(offset)),
          code_(code),
          offset_(offset),
          reason_(reason) {}

    ParseErrorCode code() const noexcept { return code_; }
    /// Byte offset into the pattern where the problem was detected.
    std::size_t offset() const noexcept { return offset_; }
    const std::string& reason() const noexcept { return reason_; }
    bool unsupported() const noexcept { return code_ == ParseErrorCode::Unsupported; }

private:
    ParseErrorCode code_;
    std::size_t offset_;
    std::string reason_;
};

inline constexpr int kMaxRepeat = 100000;

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view pattern) : pattern_(pattern) {
        for (std::size_t pos = 0; pos < pattern.size();) {
            char32_t cp = 0;
            const std::size_t n = decode_utf8(pattern, pos, cp);
            if (n == 0) throw ParseError(ParseErrorCode::InvalidUtf8, pos, "invalid UTF-8");
            chars_.push_back(cp);
            offsets_.push_back(pos);
            pos += n;
        }
        offsets_.push_back(pattern.size());
    }

    RegexAst run() {
        RegexAst ast;
        ast.root = parse_alternation();
        if (!at_end()) {
            // Only an unmatched ')' stops the top-level alternation early.
            fail(ParseErrorCode::UnbalancedGroup, "unbalanced parenthesis");
        }
        ast.group_count = group_count_;
        ast.group_names = group_names_;
        return ast;
    }

private:
    std::string_view pattern_;
    std::u32string chars_;
    std::vector<std::size_t> offsets_;
    std::size_t i_ = 0;
    int group_count_ = 0;
    std::vector<std::string> group_names_;
    std::set<int> open_groups_;

    bool at_end() const { return i_ >= chars_.size(); }
    char32_t peek(std::size_t ahead = 0) const {
        return i_ + ahead < chars_.size() ? chars_[i_ + ahead] : char32_t{0};
    }
    bool has(std::size_t ahead = 0) const { return i_ + ahead < chars_.size(); }
    std::size_t offset() const { return offsets_[std::min(i_, chars_.size())]; }

    [[noreturn]] void fail(ParseErrorCode code, const std::string& reason) const {
        throw ParseError(code, offset(), reason);
    }
    [[noreturn]] void fail_at(std::size_t index, ParseErrorCode code, const std::string& reason) const {
        throw ParseError(code, offsets_[std::min(index, chars_.size())], reason);
    }

    std::optional<int> lookup_group(const std::string& name) const {
        for (std::size_t g = 0; g < group_names_.size(); ++g) {
            if (group_names_[g] == name) return static_cast<int>(g + 1);
        }
        return std::nullopt;
    }

    Node parse_alternation() {
        std::vector<Node> branches;
        branches.push_back(parse_concat());
        while (has() && peek() == '|') {
            ++i_;
            branches.push_back(parse_concat());
        }
        if (branches.size() == 1) return std::move(branches.front());
        Node alt;
        alt.kind = NodeKind::Alternation;
        alt.children = std::move(branches);
        return alt;
    }

    Node parse_concat() {
        std::vector<Node> items;
        while (has() && peek() != '|' && peek() != ')') {
            std::optional<Node> atom = parse_atom();
            if (!atom) continue;  // comment group
            items.push_back(parse_quantifiers(std::move(*atom)));
        }
        if (items.empty()) return Node{};
        if (items.size() == 1) return std::move(items.front());
        Node cat;
        cat.kind = NodeKind::Concat;
        cat.children = std::move(items);
        return cat;
    }

    // Recognizes {m}, {m,}, {,n}, {m,n} starting at the current '{'.
    std::optional<std::pair<int, int>> scan_brace(std::size_t& consumed) const {
        std::size_t j = i_ + 1;
        auto read_number = [&](std::optional<long>& value) {
            long v = 0;
            bool any = false;
            while (j < chars_.size() && chars_[j] >= '0' && chars_[j] <= '9') {
                v = std::min<long>(v * 10 + (chars_[j] - '0'), 10L * kMaxRepeat);
                any = true;
                ++j;
            }
            if (any) value = v;
        };
        std::optional<long> lo, hi;
        read_number(lo);
        bool comma = false;
        if (j < chars_.size() && chars_[j] == ',') {
            comma = true;
            ++j;
            read_number(hi);
        }
        if (j >= chars_.size() || chars_[j] != '}') return std::nullopt;
        if (!lo && !hi) return std::nullopt;
        consumed = j + 1 - i_;
        const long min = lo.value_or(0);
        const long max = comma ? (hi ? *hi : static_cast<long>(kUnbounded)) : min;
        if (min > kMaxRepeat || max > kMaxRepeat) fail(ParseErrorCode::InvalidQuantifier, "repeat count too large");
        if (max != kUnbounded && min > max) fail(ParseErrorCode::InvalidQuantifier, "min repeat greater than max repeat");
        return std::pair<int, int>{static_cast<int>(min), static_cast<int>(max)};
    }

    bool quantifier_ahead() const {
        if (!has()) return false;
        const char32_t c = peek();
        if (c == '*' || c == '+' || c == '?') return true;
        if (c == '{') {
            std::size_t consumed = 0;
            return scan_brace(consumed).has_value();
        }
        return false;
    }

    Node parse_quantifiers(Node atom) {
        bool quantified = false;
        while (quantifier_ahead()) {
            if (quantified) fail(ParseErrorCode::MultipleRepeat, "multiple repeat");
            if (is_assertion(atom.kind) || (atom.kind == NodeKind::InlineFlags && atom.children.empty())) {
                fail(ParseErrorCode::NothingToRepeat, "nothing to repeat");
            }
            Node q;
            q.kind = NodeKind::Quantifier;
            const char32_t c = peek();
            q.codepoint = c;
            if (c == '*') {
                q.min = 0, q.max = kUnbounded, ++i_;
            } else if (c == '+') {
                q.min = 1, q.max = kUnbounded, ++i_;
            } else if (c == '?') {
                q.min = 0, q.max = 1, ++i_;
            } else {
                std::size_t consumed = 0;
                const auto bounds = scan_brace(consumed);
                q.min = bounds->first;
                q.max = bounds->second;
                i_ += consumed;
            }
            if (has() && peek() == '?') {
                q.lazy = true;
                ++i_;
            } else if (has() && peek() == '+') {
                fail(ParseErrorCode::Unsupported, "possessive quantifiers are not supported");
            }
            q.children.push_back(std::move(atom));
            atom = std::move(q);
            quantified = true;
        }
        return atom;
    }

    static Node leaf(NodeKind kind, char32_t cp = 0) {
        Node n;
        n.kind = kind;
        n.codepoint = cp;
        return n;
    }

    std::optional<Node> parse_atom() {
        const char32_t c = peek();
        switch (c) {
            case '(': return parse_group();
            case '[': return parse_class();
            case '.': ++i_; return leaf(NodeKind::Dot);
            case '^': ++i_; return leaf(NodeKind::AnchorStart, '^');
            case '$': ++i_; return leaf(NodeKind::AnchorEnd, '$');
            case '\\': return parse_escape();
            case '*':
            case '+':
            case '?': fail(ParseErrorCode::NothingToRepeat, "nothing to repeat");
            case '{':
                if (quantifier_ahead()) fail(ParseErrorCode::NothingToRepeat, "nothing to repeat");
                ++i_;
                return leaf(NodeKind::Literal, '{');
            default: ++i_; return leaf(NodeKind::Literal, c);
        }
    }

    std::string read_name(char32_t terminator) {
        const std::size_t start = i_;
        std::string name;
        while (has() && peek() != terminator) {
            const char32_t ch = peek();
            const bool ok = ch == '_' || (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                            (!name.empty() && ch >= '0' && ch <= '9');
            if (!ok) fail(ParseErrorCode::Syntax, "bad character in group name");
            name.push_back(static_cast<char>(ch));
            ++i_;
        }
        if (!has()) fail(ParseErrorCode::Syntax, "missing group name terminator");
        if (name.empty()) fail_at(start, ParseErrorCode::Syntax, "missing group name");
        ++i_;  // terminator
        return name;
    }

    Node finish_group(Node group) {
        group.children.push_back(parse_alternation());
        if (!has() || peek() != ')') {
            if (at_end()) fail(ParseErrorCode::UnbalancedGroup, "missing ), unterminated subpattern");
            fail(ParseErrorCode::Syntax, "unexpected character in group");
        }
        ++i_;
        return group;
    }

    Node named_backref(const std::string& name, std::size_t at) {
        Node ref;
        ref.kind = NodeKind::Backreference;
        ref.name = name;
        const auto g = lookup_group(name);
        if (!g) fail_at(at, ParseErrorCode::InvalidGroupReference, "unknown group name '" + name + "'");
        if (open_groups_.count(*g)) fail_at(at, ParseErrorCode::InvalidGroupReference, "cannot refer to an open group");
        ref.group = *g;
        return ref;
    }

    Node open_capture(NodeKind kind, std::string name) {
        Node group;
        group.kind = kind;
        group.group = ++group_count_;
        group.name = name;
        group_names_.push_back(std::move(name));
        open_groups_.insert(group.group);
        Node done = finish_group(std::move(group));
        open_groups_.erase(done.group);
        return done;
    }

    std::optional<Node> parse_group() {
        const std::size_t open_index = i_;
        ++i_;  // (
        if (!has() || peek() != '?') return open_capture(NodeKind::CaptureGroup, "");
        ++i_;  // ?
        if (!has()) fail(ParseErrorCode::UnbalancedGroup, "unexpected end of pattern");
        const char32_t c = peek();
        auto simple = [&](NodeKind kind) {
            ++i_;
            Node g;
            g.kind = kind;
            return finish_group(std::move(g));
        };
        auto checked_lookbehind = [&](NodeKind kind) {
            Node g = simple(kind);
            if (!fixed_width(g.children.front())) {
                fail_at(open_index, ParseErrorCode::LookbehindNotFixedWidth, "look-behind requires fixed-width pattern");
            }
            return g;
        };
        switch (c) {
            case ':': return simple(NodeKind::NonCapturingGroup);
            case '=': return simple(NodeKind::Lookahead);
            case '!': return simple(NodeKind::NegativeLookahead);
            case '#': {
                while (has() && peek() != ')') ++i_;
                if (!has()) fail(ParseErrorCode::UnbalancedGroup, "missing ), unterminated comment");
                ++i_;
                return std::nullopt;
            }
            case '(': fail(ParseErrorCode::Unsupported, "conditional groups are not supported");
            case '>': fail(ParseErrorCode::Unsupported, "atomic groups are not supported");
            case '|': fail(ParseErrorCode::Unsupported, "branch-reset groups are not supported");
            case 'R':
            case '&':
            case '+':
            case '0': case '1': case '2': case '3': case '4':
            case '5': case '6': case '7': case '8': case '9':
                fail(ParseErrorCode::Unsupported, "recursion is not supported");
            case '<': {
                if (peek(1) == '=') {
                    ++i_;
                    return checked_lookbehind(NodeKind::Lookbehind);
                }
                if (peek(1) == '!') {
                    ++i_;
                    return checked_lookbehind(NodeKind::NegativeLookbehind);
                }
                ++i_;
                const std::size_t at = i_;
                std::string name = read_name('>');
                if (lookup_group(name)) fail_at(at, ParseErrorCode::Syntax, "redefinition of group name");
                return open_capture(NodeKind::NamedGroup, std::move(name));
            }
            case 'P': {
                const char32_t next = peek(1);
                if (next == '<') {
                    i_ += 2;
                    const std::size_t at = i_;
                    std::string name = read_name('>');
                    if (lookup_group(name)) fail_at(at, ParseErrorCode::Syntax, "redefinition of group name");
                    return open_capture(NodeKind::NamedGroup, std::move(name));
                }
                if (next == '=') {
                    i_ += 2;
                    const std::size_t at = i_;
                    std::string name = read_name(')');
                    return named_backref(name, at);
                }
                if (next == '>') fail(ParseErrorCode::Unsupported, "recursion is not supported");
                fail(ParseErrorCode::Syntax, "unknown extension ?P");
            }
            default: break;
        }
        // Inline flags.
        std::string flags;
        while (has() && std::string_view("aiLmsux-").find(static_cast<char>(peek() < 128 ? peek() : 0)) !=
                            std::string_view::npos) {
            flags.push_back(static_cast<char>(peek()));
            ++i_;
        }
        if (flags.empty()) fail(ParseErrorCode::Syntax, "unknown extension");
        if (!has()) fail(ParseErrorCode::UnbalancedGroup, "missing ), unterminated flag group");
        if (flags != "i") fail(ParseErrorCode::Unsupported, "only the inline flag (?i) is supported");
        Node flag;
        flag.kind = NodeKind::InlineFlags;
        flag.case_insensitive = true;
        if (peek() == ')') {
            if (open_index != 0) fail_at(open_index, ParseErrorCode::Syntax, "global flags not at the start of the expression");
            ++i_;
            return flag;
        }
        if (peek() == ':') {
            ++i_;
            return finish_group(std::move(flag));
        }
        fail(ParseErrorCode::Syntax, "missing -, : or ) in flag group");
    }

    static int hex_value(char32_t c) {
        if (c >= '0' && c <= '9') return static_cast<int>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<int>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<int>(c - 'A' + 10);
        return -1;
    }

    char32_t read_hex(std::size_t digits) {
        char32_t v = 0;
        for (std::size_t k = 0; k < digits; ++k) {
            if (!has() || hex_value(peek()) < 0) fail(ParseErrorCode::InvalidEscape, "incomplete hex escape");
            v = v * 16 + static_cast<char32_t>(hex_value(peek()));
            ++i_;
        }
        if (v > 0x10FFFF || (v >= 0xD800 && v <= 0xDFFF)) fail(ParseErrorCode::InvalidEscape, "bad escape codepoint");
        return v;
    }

    char32_t read_octal() {
        char32_t v = 0;
        for (int k = 0; k < 3 && has() && peek() >= '0' && peek() <= '7'; ++k) {
            v = v * 8 + (peek() - '0');
            ++i_;
        }
        if (v > 0377) fail(ParseErrorCode::InvalidEscape, "octal escape value outside of range");
        return v;
    }

    // Escapes that denote one codepoint in both contexts; i_ is past the
    // backslash and at the escape letter. Returns nullopt when not such an escape.
    std::optional<char32_t> simple_escape() {
        const char32_t c = peek();
        switch (c) {
            case 'n': ++i_; return U'\n';
            case 't': ++i_; return U'\t';
            case 'r': ++i_; return U'\r';
            case 'f': ++i_; return U'\f';
            case 'v': ++i_; return U'\v';
            case 'a': ++i_; return U'\a';
            case 'x': ++i_; return read_hex(2);
            case 'u': ++i_; return read_hex(4);
            case 'U': ++i_; return read_hex(8);
            default: break;
        }
        return std::nullopt;
    }

    [[noreturn]] void bad_letter_escape(char32_t c) {
        static constexpr std::string_view kForeign = "pPGKQERXzhHNCcegoi";
        if (c < 128 && kForeign.find(static_cast<char>(c)) != std::string_view::npos) {
            fail(ParseErrorCode::Unsupported, std::string("escape \\") + static_cast<char>(c) + " is not supported");
        }
        fail(ParseErrorCode::InvalidEscape, std::string("bad escape \\") + static_cast<char>(c));
    }

    static std::optional<std::pair<ShorthandKind, bool>> shorthand_of(char32_t c) {
        switch (c) {
            case 'd': return std::pair{ShorthandKind::Digit, false};
            case 'D': return std::pair{ShorthandKind::Digit, true};
            case 'w': return std::pair{ShorthandKind::Word, false};
            case 'W': return std::pair{ShorthandKind::Word, true};
            case 's': return std::pair{ShorthandKind::Space, false};
            case 'S': return std::pair{ShorthandKind::Space, true};
            default: return std::nullopt;
        }
    }

    Node parse_escape() {
        const std::size_t start = i_;
        ++i_;  // backslash
        if (!has()) fail_at(start, ParseErrorCode::InvalidEscape, "bad escape (end of pattern)");
        const char32_t c = peek();
        if (const auto sh = shorthand_of(c)) {
            ++i_;
            Node n;
            n.kind = NodeKind::Shorthand;
            n.shorthand = sh->first;
            n.negated = sh->second;
            return n;
        }
        switch (c) {
            case 'b': ++i_; return leaf(NodeKind::WordBoundary);
            case 'B': ++i_; return leaf(NodeKind::NonWordBoundary);
            case 'A': ++i_; return leaf(NodeKind::AnchorStart, 'A');
            case 'Z': ++i_; return leaf(NodeKind::AnchorEnd, 'Z');
            case 'k': {
                ++i_;
                if (!has() || peek() != '<') fail(ParseErrorCode::InvalidEscape, "bad escape \\k");
                ++i_;
                const std::size_t at = i_;
                std::string name = read_name('>');
                return named_backref(name, at);
            }
            default: break;
        }
        if (c == '0') return leaf(NodeKind::Literal, read_octal());
        if (c >= '1' && c <= '9') {
            // Three octal digits form an octal escape, otherwise up to two digits name a group.
            if (has(2) && peek(1) >= '0' && peek(1) <= '7' && peek(2) >= '0' && peek(2) <= '7' && c <= '7') {
                return leaf(NodeKind::Literal, read_octal());
            }
            int group = static_cast<int>(c - '0');
            ++i_;
            if (has() && peek() >= '0' && peek() <= '9') {
                group = group * 10 + static_cast<int>(peek() - '0');
                ++i_;
            }
            if (group > group_count_) fail_at(start, ParseErrorCode::InvalidGroupReference, "invalid group reference");
            if (open_groups_.count(group)) {
                fail_at(start, ParseErrorCode::InvalidGroupReference, "cannot refer to an open group");
            }
            Node ref;
            ref.kind = NodeKind::Backreference;
            ref.group = group;
            return ref;
        }
        if (const auto cp = simple_escape()) return leaf(NodeKind::Literal, *cp);
        if (c < 128 && ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))) bad_letter_escape(c);
        ++i_;
        return leaf(NodeKind::Literal, c);
    }

    // One class member at i_; returns a range item (lo == hi) or a shorthand.
    ClassItem parse_class_atom() {
        if (peek() != '\\') {
            const char32_t c = peek();
            ++i_;
            return ClassItem::single(c);
        }
        const std::size_t start = i_;
        ++i_;
        if (!has()) fail_at(start, ParseErrorCode::InvalidEscape, "bad escape (end of pattern)");
        const char32_t c = peek();
        if (const auto sh = shorthand_of(c)) {
            ++i_;
            return ClassItem::escape(sh->first, sh->second);
        }
        if (c == 'b') {
            ++i_;
            return ClassItem::single(U'\b');
        }
        if (c >= '0' && c <= '7') return ClassItem::single(read_octal());
        if (c == '8' || c == '9') fail(ParseErrorCode::InvalidEscape, "bad escape in character class");
        if (const auto cp = simple_escape()) return ClassItem::single(*cp);
        if (c < 128 && ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))) bad_letter_escape(c);
        ++i_;
        return ClassItem::single(c);
    }

    Node parse_class() {
        const std::size_t open = i_;
        ++i_;  // [
        Node cls;
        cls.kind = NodeKind::CharClass;
        if (has() && peek() == '^') {
            cls.negated = true;
            ++i_;
        }
        bool first = true;
        while (true) {
            if (!has()) fail_at(open, ParseErrorCode::Syntax, "unterminated character set");
            if (peek() == ']' && !first) {
                ++i_;
                break;
            }
            first = false;
            const std::size_t item_start = i_;
            ClassItem lo = parse_class_atom();
            if (has() && peek() == '-' && has(1) && peek(1) != ']') {
                ++i_;  // -
                ClassItem hi = parse_class_atom();
                if (lo.is_shorthand || hi.is_shorthand) {
                    fail_at(item_start, ParseErrorCode::InvalidRange, "bad character range");
                }
                if (lo.lo > hi.lo) fail_at(item_start, ParseErrorCode::InvalidRange, "bad character range");
                cls.items.push_back(ClassItem::range(lo.lo, hi.lo));
            } else {
                cls.items.push_back(lo);
            }
        }
        return cls;
    }

    // Width of the strings matched by node, when every match has the same length.
    static std::optional<long> fixed_width(const Node& node) {
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
                return 0;
            case NodeKind::Literal:
            case NodeKind::Dot:
            case NodeKind::CharClass:
            case NodeKind::Shorthand:
                return 1;
            case NodeKind::InlineFlags:
                return node.children.empty() ? std::optional<long>(0) : fixed_width(node.children.front());
            case NodeKind::Concat: {
                long total = 0;
                for (const Node& child : node.children) {
                    const auto w = fixed_width(child);
                    if (!w) return std::nullopt;
                    total += *w;
                }
                return total;
            }
            case NodeKind::Alternation: {
                std::optional<long> width;
                for (const Node& child : node.children) {
                    const auto w = fixed_width(child);
                    if (!w || (width && *width != *w)) return std::nullopt;
                    width = w;
                }
                return width;
            }
            case NodeKind::Quantifier: {
                if (node.max != node.min) return std::nullopt;
                const auto w = fixed_width(node.children.front());
                if (!w) return std::nullopt;
                return *w * node.min;
            }
            case NodeKind::CaptureGroup:
            case NodeKind::NonCapturingGroup:
            case NodeKind::NamedGroup:
                return fixed_width(node.children.front());
            case NodeKind::Backreference:
                return std::nullopt;
        }
        return std::nullopt;
    }

public:
    static std::optional<long> width_of(const Node& node) { return fixed_width(node); }
};

inline void render_literal(std::string& out, char32_t c, bool in_class) {
    static constexpr std::string_view kMeta = ".^$*+?()[]{}|\\";
    static constexpr std::string_view kClassMeta = "]\\^-[";
    const std::string_view meta = in_class ? kClassMeta : kMeta;
    switch (c) {
        case '\n': out += "\\n"; return;
        case '\t': out += "\\t"; return;
        case '\r': out += "\\r"; return;
        case '\f': out += "\\f"; return;
        case '\v': out += "\\v"; return;
        default: break;
    }
    if (c < 0x20 || c == 0x7F) {
        static constexpr char kHex[] = "0123456789abcdef";
        out += "\\x";
        out.push_back(kHex[(c >> 4) & 0xF]);
        out.push_back(kHex[c & 0xF]);
        return;
    }
    if (c < 128 && meta.find(static_cast<char>(c)) != std::string_view::npos) out.push_back('\\');
    append_utf8(out, c);
}

inline void render_shorthand(std::string& out, ShorthandKind k, bool negated) {
    const char letters[3][2] = {{'d', 'D'}, {'w', 'W'}, {'s', 'S'}};
    out.push_back('\\');
    out.push_back(letters[static_cast<int>(k)][negated ? 1 : 0]);
}

inline void render_node(std::string& out, const Node& node);

inline void render_quantifier_suffix(std::string& out, const Node& q) {
    switch (q.codepoint) {
        case '*': out.push_back('*'); break;
        case '+': out.push_back('+'); break;
        case '?': out.push_back('?'); break;
        default:
            out.push_back('{');
            out += std::to_string(q.min);
            if (q.max != q.min) {
                out.push_back(',');
                if (q.max != kUnbounded) out += std::to_string(q.max);
            }
            out.push_back('}');
    }
    if (q.lazy) out.push_back('?');
}

inline void render_node(std::string& out, const Node& node) {
    switch (node.kind) {
        case NodeKind::Empty: return;
        case NodeKind::Concat: {
            bool after_numeric_ref = false;
            for (const Node& child : node.children) {
                if (after_numeric_ref && child.kind == NodeKind::Literal && child.codepoint >= '0' &&
                    child.codepoint <= '9') {
                    out += "\\x3";
                    out.push_back(static_cast<char>(child.codepoint));
                } else if (after_numeric_ref && child.kind == NodeKind::Quantifier &&
                           child.children.front().kind == NodeKind::Literal &&
                           child.children.front().codepoint >= '0' && child.children.front().codepoint <= '9') {
                    out += "\\x3";
                    out.push_back(static_cast<char>(child.children.front().codepoint));
                    render_quantifier_suffix(out, child);
                } else {
                    render_node(out, child);
                }
                after_numeric_ref = child.kind == NodeKind::Backreference && child.name.empty();
            }
            return;
        }
        case NodeKind::Alternation:
            for (std::size_t k = 0; k < node.children.size(); ++k) {
                if (k) out.push_back('|');
                render_node(out, node.children[k]);
            }
            return;
        case NodeKind::Literal: render_literal(out, node.codepoint, false); return;
        case NodeKind::Dot: out.push_back('.'); return;
        case NodeKind::CharClass:
            out.push_back('[');
            if (node.negated) out.push_back('^');
            for (const ClassItem& item : node.items) {
                if (item.is_shorthand) {
                    render_shorthand(out, item.shorthand, item.negated);
                } else {
                    render_literal(out, item.lo, true);
                    if (item.hi != item.lo) {
                        out.push_back('-');
                        render_literal(out, item.hi, true);
                    }
                }
            }
            out.push_back(']');
            return;
        case NodeKind::Shorthand: render_shorthand(out, node.shorthand, node.negated); return;
        case NodeKind::AnchorStart: out += node.codepoint == 'A' ? "\\A" : "^"; return;
        case NodeKind::AnchorEnd: out += node.codepoint == 'Z' ? "\\Z" : "$"; return;
        case NodeKind::WordBoundary: out += "\\b"; return;
        case NodeKind::NonWordBoundary: out += "\\B"; return;
        case NodeKind::Quantifier:
            render_node(out, node.children.front());
            render_quantifier_suffix(out, node);
            return;
        case NodeKind::CaptureGroup:
        case NodeKind::NonCapturingGroup:
        case NodeKind::NamedGroup:
        case NodeKind::Lookahead:
        case NodeKind::NegativeLookahead:
        case NodeKind::Lookbehind:
        case NodeKind::NegativeLookbehind: {
            static constexpr std::string_view kOpen[] = {"(", "(?:", "", "", "(?=", "(?!", "(?<=", "(?<!"};
            if (node.kind == NodeKind::NamedGroup) {
                out += "(?P<" + node.name + ">";
            } else {
                const auto idx = node.kind == NodeKind::CaptureGroup        ? 0
                                 : node.kind == NodeKind::NonCapturingGroup ? 1
                                 : node.kind == NodeKind::Lookahead         ? 4
                                 : node.kind == NodeKind::NegativeLookahead ? 5
                                 : node.kind == NodeKind::Lookbehind        ? 6
                                                                            : 7;
                out += kOpen[idx];
            }
            render_node(out, node.children.front());
            out.push_back(')');
            return;
        }
        case NodeKind::Backreference:
            if (node.name.empty()) {
                out.push_back('\\');
                out += std::to_string(node.group);
            } else {
                out += "(?P=" + node.name + ")";
            }
            return;
        case NodeKind::InlineFlags:
            if (node.children.empty()) {
                out += "(?i)";
            } else {
                out += "(?i:";
                render_node(out, node.children.front());
                out.push_back(')');
            }
            return;
    }
}

}  // namespace detail

/// Parses a pattern in the supported Python-flavoured dialect. Throws ParseError.
inline RegexAst parse(std::string_view pattern) { return detail::Parser(pattern).run(); }

/// Pattern text that parses back to an isomorphic tree.
inline std::string render(const RegexAst& ast) {
    std::string out;
    detail::render_node(out, ast.root);
    return out;
}

/// Length of every match of node when that length is fixed.
inline std::optional<long> fixed_match_width(const Node& node) { return detail::Parser::width_of(node); }

}  // namespace regex_forge

#endif  // REGEX_FORGE_PARSER_HPP
