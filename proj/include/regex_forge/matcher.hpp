#ifndef REGEX_FORGE_MATCHER_HPP
#define REGEX_FORGE_MATCHER_HPP

#include <chrono>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "regex_forge/ast.hpp"
#include "regex_forge/charclass.hpp"
#include "regex_forge/parser.hpp"
#include "regex_forge/unicode.hpp"

namespace regex_forge {

enum class MatchMode : std::uint8_t { Partial, Full };

constexpr std::string_view match_mode_name(MatchMode m) { return m == MatchMode::Partial ? "partial" : "full"; }

enum class Verdict : std::uint8_t { Match, NoMatch, Timeout, Unsupported };

constexpr std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Match: return "match";
        case Verdict::NoMatch: return "no-match";
        case Verdict::Timeout: return "timeout";
        case Verdict::Unsupported: return "unsupported";
    }
    return "unsupported";
}

struct MatchOutcome {
    Verdict verdict = Verdict::NoMatch;
    std::uint64_t steps_used = 0;
    std::chrono::nanoseconds elapsed{0};
    bool wall_cap_hit = false;

    bool completed() const { return verdict == Verdict::Match || verdict == Verdict::NoMatch; }
};

struct MatchLimits {
    std::uint64_t step_budget = 1'000'000;
    std::chrono::milliseconds wall_cap{100};  // zero disables the wall-clock cap
    std::size_t input_cap = 4096;             // in scalars
};

class CompileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

enum class Op : std::uint8_t {
    Char,
    Class,
    Split,
    Jmp,
    Save,
    AssertBegin,
    AssertEnd,
    WordBoundary,
    NotWordBoundary,
    Backref,
    Look,
    Mark,
    Progress,
    Match,
};

struct Inst {
    Op op = Op::Match;
    bool flag = false;  // Backref: case-insensitive; Look: negative
    bool behind = false;
    std::int32_t x = 0;  // jump target / slot / class index / group / sub-program
    std::int32_t y = 0;  // second split target / lookbehind width
    char32_t c = 0;
};

inline constexpr std::size_t kMaxProgramSize = 200'000;

struct Program {
    std::vector<Inst> code;
    std::vector<RangeSet> classes;
    int slots = 0;  // 2 per group including group 0
    int marks = 0;
};

class Compiler {
public:
    Program compile(const RegexAst& ast) {
        prog_.slots = 2 * (ast.group_count + 1);
        bool global_ci = false;
        for (const Node& n : ast.root.kind == NodeKind::Concat ? ast.root.children : std::vector<Node>{ast.root}) {
            if (n.kind == NodeKind::InlineFlags && n.children.empty()) global_ci = true;
        }
        emit_node(ast.root, global_ci);
        emit({Op::Match});
        while (!pending_.empty()) {
            auto [inst_index, node, ci] = pending_.back();
            pending_.pop_back();
            prog_.code[inst_index].x = static_cast<std::int32_t>(prog_.code.size());
            emit_node(*node, ci);
            emit({Op::Match});
        }
        return std::move(prog_);
    }

private:
    struct PendingLook {
        std::size_t inst;
        const Node* node;
        bool ci;
    };
    Program prog_;
    std::vector<PendingLook> pending_;

    std::size_t emit(Inst inst) {
        if (prog_.code.size() >= kMaxProgramSize) throw CompileError("program too large");
        prog_.code.push_back(inst);
        return prog_.code.size() - 1;
    }
    std::int32_t here() const { return static_cast<std::int32_t>(prog_.code.size()); }

    void emit_char_node(const Node& node, bool ci) {
        const bool folds = ascii_lower(node.codepoint) != ascii_upper(node.codepoint);
        if (node.kind == NodeKind::Literal && !(ci && folds)) {
            Inst in{Op::Char};
            in.c = node.codepoint;
            emit(in);
            return;
        }
        prog_.classes.push_back(node_ranges(node, ci));
        Inst in{Op::Class};
        in.x = static_cast<std::int32_t>(prog_.classes.size() - 1);
        emit(in);
    }

    static bool nullable(const Node& node) {
        switch (node.kind) {
            case NodeKind::Literal:
            case NodeKind::Dot:
            case NodeKind::CharClass:
            case NodeKind::Shorthand: return false;
            case NodeKind::Concat:
                for (const Node& c : node.children) {
                    if (!nullable(c)) return false;
                }
                return true;
            case NodeKind::Alternation:
                for (const Node& c : node.children) {
                    if (nullable(c)) return true;
                }
                return false;
            case NodeKind::Quantifier: return node.min == 0 || nullable(node.children.front());
            case NodeKind::CaptureGroup:
            case NodeKind::NonCapturingGroup:
            case NodeKind::NamedGroup: return nullable(node.children.front());
            case NodeKind::InlineFlags: return node.children.empty() || nullable(node.children.front());
            default: return true;  // assertions, backreferences, empty
        }
    }

    void emit_star(const Node& body, bool lazy, bool ci) {
        const bool guard = nullable(body);
        const std::int32_t loop = here();
        const std::size_t split = emit({Op::Split});
        const std::int32_t body_start = here();
        int mark = 0;
        if (guard) {
            mark = prog_.marks++;
            Inst m{Op::Mark};
            m.x = mark;
            emit(m);
        }
        emit_node(body, ci);
        if (guard) {
            Inst p{Op::Progress};
            p.x = mark;
            emit(p);
        }
        Inst j{Op::Jmp};
        j.x = loop;
        emit(j);
        const std::int32_t exit = here();
        prog_.code[split].x = lazy ? exit : body_start;
        prog_.code[split].y = lazy ? body_start : exit;
    }

    void emit_node(const Node& node, bool ci) {
        switch (node.kind) {
            case NodeKind::Empty: return;
            case NodeKind::Concat:
                for (const Node& child : node.children) emit_node(child, ci);
                return;
            case NodeKind::Alternation: {
                std::vector<std::size_t> exits;
                for (std::size_t k = 0; k < node.children.size(); ++k) {
                    if (k + 1 < node.children.size()) {
                        const std::size_t split = emit({Op::Split});
                        prog_.code[split].x = here();
                        emit_node(node.children[k], ci);
                        exits.push_back(emit({Op::Jmp}));
                        prog_.code[split].y = here();
                    } else {
                        emit_node(node.children[k], ci);
                    }
                }
                for (std::size_t e : exits) prog_.code[e].x = here();
                return;
            }
            case NodeKind::Literal:
            case NodeKind::Dot:
            case NodeKind::CharClass:
            case NodeKind::Shorthand: emit_char_node(node, ci); return;
            case NodeKind::AnchorStart: emit({Op::AssertBegin}); return;
            case NodeKind::AnchorEnd: emit({Op::AssertEnd}); return;
            case NodeKind::WordBoundary: emit({Op::WordBoundary}); return;
            case NodeKind::NonWordBoundary: emit({Op::NotWordBoundary}); return;
            case NodeKind::Quantifier: {
                const Node& body = node.children.front();
                for (int k = 0; k < node.min; ++k) emit_node(body, ci);
                if (node.max == kUnbounded) {
                    emit_star(body, node.lazy, ci);
                    return;
                }
                std::vector<std::size_t> splits;
                for (int k = node.min; k < node.max; ++k) {
                    const std::size_t split = emit({Op::Split});
                    splits.push_back(split);
                    const std::int32_t body_start = here();
                    emit_node(body, ci);
                    prog_.code[split].x = body_start;  // exit filled below
                }
                const std::int32_t exit = here();
                for (std::size_t s : splits) {
                    const std::int32_t body_start = prog_.code[s].x;
                    prog_.code[s].x = node.lazy ? exit : body_start;
                    prog_.code[s].y = node.lazy ? body_start : exit;
                }
                return;
            }
            case NodeKind::CaptureGroup:
            case NodeKind::NamedGroup: {
                Inst open{Op::Save};
                open.x = 2 * node.group;
                emit(open);
                emit_node(node.children.front(), ci);
                Inst close{Op::Save};
                close.x = 2 * node.group + 1;
                emit(close);
                return;
            }
            case NodeKind::NonCapturingGroup: emit_node(node.children.front(), ci); return;
            case NodeKind::Backreference: {
                Inst ref{Op::Backref};
                ref.x = node.group;
                ref.flag = ci;
                emit(ref);
                return;
            }
            case NodeKind::Lookahead:
            case NodeKind::NegativeLookahead:
            case NodeKind::Lookbehind:
            case NodeKind::NegativeLookbehind: {
                Inst look{Op::Look};
                look.flag = node.kind == NodeKind::NegativeLookahead || node.kind == NodeKind::NegativeLookbehind;
                look.behind = node.kind == NodeKind::Lookbehind || node.kind == NodeKind::NegativeLookbehind;
                if (look.behind) {
                    const auto w = fixed_match_width(node.children.front());
                    if (!w) throw CompileError("look-behind requires fixed width");
                    look.y = static_cast<std::int32_t>(*w);
                }
                pending_.push_back({emit(look), &node.children.front(), ci});
                return;
            }
            case NodeKind::InlineFlags:
                if (!node.children.empty()) emit_node(node.children.front(), true);
                return;
        }
    }
};

enum class RunResult : std::uint8_t { Match, NoMatch, Timeout };

class Machine {
public:
    Machine(const Program& prog, std::u32string_view input, const MatchLimits& limits)
        : prog_(prog), input_(input), limits_(limits) {
        if (limits.wall_cap.count() > 0) deadline_ = std::chrono::steady_clock::now() + limits.wall_cap;
    }

    RunResult search(MatchMode mode) {
        const std::size_t n = input_.size();
        for (std::size_t start = 0; start <= n; ++start) {
            caps_.assign(static_cast<std::size_t>(prog_.slots), -1);
            marks_.assign(static_cast<std::size_t>(prog_.marks), -1);
            const RunResult r = run(0, static_cast<std::int32_t>(start), mode == MatchMode::Full ? Target::End : Target::Any, -1);
            if (r != RunResult::NoMatch) return r;
            if (mode == MatchMode::Full) break;
        }
        return RunResult::NoMatch;
    }

    std::uint64_t steps() const { return steps_; }
    bool wall_cap_hit() const { return wall_cap_hit_; }

private:
    enum class Target : std::uint8_t { Any, End, Exact };
    enum class FrameKind : std::uint8_t { Branch, RestoreCap, RestoreMark };
    struct Frame {
        FrameKind kind;
        std::int32_t a;
        std::int32_t b;
    };

    const Program& prog_;
    std::u32string_view input_;
    MatchLimits limits_;
    std::chrono::steady_clock::time_point deadline_{};
    std::uint64_t steps_ = 0;
    bool wall_cap_hit_ = false;
    std::vector<std::int32_t> caps_;
    std::vector<std::int32_t> marks_;

    bool word_at(std::int32_t pos) const {
        return pos >= 0 && pos < static_cast<std::int32_t>(input_.size()) && is_word_char(input_[static_cast<std::size_t>(pos)]);
    }

    bool tick() {
        if (steps_ >= limits_.step_budget) return false;
        ++steps_;
        if ((steps_ & 0xFFF) == 0 && limits_.wall_cap.count() > 0 && std::chrono::steady_clock::now() > deadline_) {
            wall_cap_hit_ = true;
            return false;
        }
        return true;
    }

    RunResult run(std::int32_t pc, std::int32_t pos, Target target, std::int32_t exact) {
        const auto n = static_cast<std::int32_t>(input_.size());
        std::vector<Frame> stack;
        auto set_cap = [&](std::int32_t slot, std::int32_t value) {
            stack.push_back({FrameKind::RestoreCap, slot, caps_[static_cast<std::size_t>(slot)]});
            caps_[static_cast<std::size_t>(slot)] = value;
        };
        while (true) {
            bool fail = false;
            if (!tick()) return RunResult::Timeout;
            const Inst& in = prog_.code[static_cast<std::size_t>(pc)];
            switch (in.op) {
                case Op::Char:
                    if (pos < n && input_[static_cast<std::size_t>(pos)] == in.c) {
                        ++pos, ++pc;
                    } else {
                        fail = true;
                    }
                    break;
                case Op::Class:
                    if (pos < n && ranges_contain(prog_.classes[static_cast<std::size_t>(in.x)], input_[static_cast<std::size_t>(pos)])) {
                        ++pos, ++pc;
                    } else {
                        fail = true;
                    }
                    break;
                case Op::Split:
                    stack.push_back({FrameKind::Branch, in.y, pos});
                    pc = in.x;
                    break;
                case Op::Jmp: pc = in.x; break;
                case Op::Save:
                    set_cap(in.x, pos);
                    ++pc;
                    break;
                case Op::AssertBegin:
                    if (pos == 0) ++pc; else fail = true;
                    break;
                case Op::AssertEnd:
                    if (pos == n) ++pc; else fail = true;
                    break;
                case Op::WordBoundary:
                case Op::NotWordBoundary: {
                    const bool boundary = word_at(pos - 1) != word_at(pos);
                    if (boundary == (in.op == Op::WordBoundary)) ++pc; else fail = true;
                    break;
                }
                case Op::Backref: {
                    const std::int32_t s = caps_[static_cast<std::size_t>(2 * in.x)];
                    const std::int32_t e = caps_[static_cast<std::size_t>(2 * in.x + 1)];
                    if (s < 0 || e < 0) {
                        fail = true;
                        break;
                    }
                    const std::int32_t len = e - s;
                    if (pos + len > n) {
                        fail = true;
                        break;
                    }
                    for (std::int32_t k = 0; k < len && !fail; ++k) {
                        char32_t a = input_[static_cast<std::size_t>(s + k)];
                        char32_t b = input_[static_cast<std::size_t>(pos + k)];
                        if (in.flag) a = ascii_lower(a), b = ascii_lower(b);
                        fail = a != b;
                    }
                    if (!fail) pos += len, ++pc;
                    break;
                }
                case Op::Look: {
                    const std::vector<std::int32_t> saved = caps_;
                    RunResult r = RunResult::NoMatch;
                    if (in.behind) {
                        if (pos - in.y >= 0) r = run(in.x, pos - in.y, Target::Exact, pos);
                    } else {
                        r = run(in.x, pos, Target::Any, -1);
                    }
                    if (r == RunResult::Timeout) return r;
                    const bool matched = r == RunResult::Match;
                    if (matched == in.flag) {
                        caps_ = saved;
                        fail = true;
                        break;
                    }
                    if (in.flag) {
                        caps_ = saved;
                    } else {
                        // Keep captures set inside a positive lookaround, undoable on backtrack.
                        std::vector<std::int32_t> now = caps_;
                        caps_ = saved;
                        for (std::size_t slot = 0; slot < now.size(); ++slot) {
                            if (now[slot] != saved[slot]) set_cap(static_cast<std::int32_t>(slot), now[slot]);
                        }
                    }
                    ++pc;
                    break;
                }
                case Op::Mark:
                    stack.push_back({FrameKind::RestoreMark, in.x, marks_[static_cast<std::size_t>(in.x)]});
                    marks_[static_cast<std::size_t>(in.x)] = pos;
                    ++pc;
                    break;
                case Op::Progress:
                    if (marks_[static_cast<std::size_t>(in.x)] == pos) fail = true; else ++pc;
                    break;
                case Op::Match: {
                    const bool ok = target == Target::Any || (target == Target::End && pos == n) ||
                                    (target == Target::Exact && pos == exact);
                    if (ok) return RunResult::Match;
                    fail = true;
                    break;
                }
            }
            if (!fail) continue;
            // Backtrack.
            while (true) {
                if (stack.empty()) return RunResult::NoMatch;
                const Frame f = stack.back();
                stack.pop_back();
                if (f.kind == FrameKind::RestoreCap) {
                    caps_[static_cast<std::size_t>(f.a)] = f.b;
                } else if (f.kind == FrameKind::RestoreMark) {
                    marks_[static_cast<std::size_t>(f.a)] = f.b;
                } else {
                    pc = f.a;
                    pos = f.b;
                    break;
                }
            }
        }
    }
};

}  // namespace detail

/// A pattern compiled for the step-bounded backtracking matcher. Patterns
/// that cannot be compiled (program too large) answer every query with
/// Verdict::Unsupported.
class CompiledRegex {
public:
    CompiledRegex() = default;
    explicit CompiledRegex(const RegexAst& ast) {
        try {
            program_ = std::make_shared<const detail::Program>(detail::Compiler().compile(ast));
        } catch (const CompileError&) {
            program_.reset();
        }
    }

    bool ok() const { return program_ != nullptr; }

    MatchOutcome match(std::u32string_view input, MatchMode mode, const MatchLimits& limits = {}) const {
        const auto started = std::chrono::steady_clock::now();
        MatchOutcome out;
        if (!program_ || input.size() > limits.input_cap) {
            out.verdict = Verdict::Unsupported;
            return out;
        }
        detail::Machine machine(*program_, input, limits);
        const detail::RunResult r = machine.search(mode);
        out.steps_used = machine.steps();
        out.wall_cap_hit = machine.wall_cap_hit();
        out.verdict = r == detail::RunResult::Match     ? Verdict::Match
                      : r == detail::RunResult::NoMatch ? Verdict::NoMatch
                                                        : Verdict::Timeout;
        out.elapsed = std::chrono::steady_clock::now() - started;
        return out;
    }

private:
    std::shared_ptr<const detail::Program> program_;
};

/// Step-bounded evaluation of the full dialect, including backreferences and
/// lookaround. Partial mode searches every start offset; full mode requires
/// the whole input to match. The step budget is shared across start offsets.
inline MatchOutcome safe_match(const RegexAst& ast, std::string_view input, MatchMode mode,
                               std::uint64_t budget) {
    MatchLimits limits;
    limits.step_budget = budget;
    return CompiledRegex(ast).match(to_u32(input), mode, limits);
}

inline MatchOutcome safe_match(const RegexAst& ast, std::string_view input, MatchMode mode,
                               const MatchLimits& limits = {}) {
    return CompiledRegex(ast).match(to_u32(input), mode, limits);
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_MATCHER_HPP
