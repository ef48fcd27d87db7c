#ifndef REGEX_FORGE_NFA_HPP
#define REGEX_FORGE_NFA_HPP

#include <bitset>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "regex_forge/ast.hpp"
#include "regex_forge/charclass.hpp"
#include "regex_forge/features.hpp"
#include "regex_forge/matcher.hpp"
#include "regex_forge/unicode.hpp"

namespace regex_forge {

// The automaton alphabet is ASCII plus one symbol standing for every
// non-ASCII scalar.
inline constexpr std::size_t kAlphabetSize = 129;
inline constexpr std::size_t kOtherSymbol = 128;
using SymbolSet = std::bitset<kAlphabetSize>;
using StateId = std::uint32_t;

inline std::size_t symbol_of(char32_t c) { return c < 128 ? static_cast<std::size_t>(c) : kOtherSymbol; }

/// Concrete character used when a string must be produced for a symbol.
inline char32_t symbol_char(std::size_t symbol) { return symbol == kOtherSymbol ? char32_t{0x80} : static_cast<char32_t>(symbol); }

struct Transition {
    StateId from = 0;
    StateId to = 0;
    bool epsilon = true;
    SymbolSet label;  // empty for epsilon transitions
};

class AutomatonError : public std::runtime_error {
public:
    enum class Code { NonRegular, TooLarge };
    AutomatonError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const noexcept { return code_; }

private:
    Code code_;
};

struct Nfa {
    std::size_t state_count = 0;
    StateId start = 0;
    std::vector<StateId> accepts;  // sorted
    std::vector<Transition> transitions;
    bool trimmed = false;
    // Non-empty only for search automata: marks the Σ* wrapper, which coverage ignores.
    std::vector<bool> auxiliary_state;
    std::vector<bool> auxiliary_transition;
    // Outgoing transition ids per state, in id order.
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<bool> accepting;

    bool is_auxiliary_state(StateId s) const { return !auxiliary_state.empty() && auxiliary_state[s]; }
    bool is_auxiliary_transition(std::size_t t) const {
        return !auxiliary_transition.empty() && auxiliary_transition[t];
    }

    void index() {
        out.assign(state_count, {});
        for (std::size_t t = 0; t < transitions.size(); ++t) out[transitions[t].from].push_back(static_cast<std::uint32_t>(t));
        accepting.assign(state_count, false);
        for (StateId a : accepts) accepting[a] = true;
    }
};

struct NfaOptions {
    std::size_t state_cap = 50'000;
    /// Partial wraps the automaton as Σ*·R·Σ* with auxiliary wrapper states.
    MatchMode mode = MatchMode::Full;
    bool trim = true;
};

namespace detail {

enum class EdgeKind : std::uint8_t { Epsilon, Chars, AssertStart, AssertEnd, WordBoundary, NotWordBoundary };

struct RawEdge {
    EdgeKind kind;
    std::uint32_t to;
    SymbolSet label;
    bool auxiliary;
};

class ThompsonBuilder {
public:
    explicit ThompsonBuilder(std::size_t cap) : cap_(cap) {}

    std::vector<std::vector<RawEdge>> edges;
    std::vector<bool> auxiliary;
    bool has_word_assertion = false;
    bool has_start_assertion = false;

    std::uint32_t add_state(bool aux = false) {
        if (edges.size() >= cap_) throw AutomatonError(AutomatonError::Code::TooLarge, "automaton state cap exceeded");
        edges.emplace_back();
        auxiliary.push_back(aux);
        return static_cast<std::uint32_t>(edges.size() - 1);
    }

    void add_edge(std::uint32_t from, EdgeKind kind, std::uint32_t to, SymbolSet label = {}, bool aux = false) {
        edges[from].push_back({kind, to, label, aux});
    }

    static SymbolSet label_of(const Node& node, bool ci) {
        const RangeSet ranges = node_ranges(node, ci);
        SymbolSet label;
        for (char32_t c = 0; c < 128; ++c) {
            if (ranges_contain(ranges, c)) label.set(c);
        }
        // The non-ASCII symbol belongs only to classes that take in every
        // non-ASCII scalar, which in practice means negated classes.
        const bool other = (node.kind == NodeKind::CharClass || node.kind == NodeKind::Shorthand) &&
                           !ranges.empty() && ranges.back().hi >= 0x80 &&
                           (node.negated || covers_non_ascii(ranges));
        if (other) label.set(kOtherSymbol);
        return label;
    }

    static bool covers_non_ascii(const RangeSet& ranges) {
        for (const CodeRange& r : ranges) {
            if (r.lo <= 0x80 && r.hi == kMaxCodepoint) return true;
        }
        return false;
    }

    // Builds node starting at state `from`; returns the end state.
    std::uint32_t build(const Node& node, std::uint32_t from, bool ci) {
        switch (node.kind) {
            case NodeKind::Empty: return from;
            case NodeKind::Concat: {
                std::uint32_t s = from;
                for (const Node& child : node.children) s = build(child, s, ci);
                return s;
            }
            case NodeKind::Alternation: {
                std::vector<std::uint32_t> ends;
                for (const Node& child : node.children) ends.push_back(build(child, from, ci));
                const std::uint32_t to = add_state();
                for (std::uint32_t e : ends) add_edge(e, EdgeKind::Epsilon, to);
                return to;
            }
            case NodeKind::Literal:
            case NodeKind::Dot:
            case NodeKind::CharClass:
            case NodeKind::Shorthand: {
                const std::uint32_t to = add_state();
                const SymbolSet label = label_of(node, ci);
                if (label.any()) add_edge(from, EdgeKind::Chars, to, label);
                return to;
            }
            case NodeKind::AnchorStart:
            case NodeKind::AnchorEnd:
            case NodeKind::WordBoundary:
            case NodeKind::NonWordBoundary: {
                const std::uint32_t to = add_state();
                const EdgeKind kind = node.kind == NodeKind::AnchorStart ? EdgeKind::AssertStart
                                      : node.kind == NodeKind::AnchorEnd ? EdgeKind::AssertEnd
                                      : node.kind == NodeKind::WordBoundary ? EdgeKind::WordBoundary
                                                                            : EdgeKind::NotWordBoundary;
                if (kind == EdgeKind::AssertStart) has_start_assertion = true;
                if (kind == EdgeKind::WordBoundary || kind == EdgeKind::NotWordBoundary) has_word_assertion = true;
                add_edge(from, kind, to);
                return to;
            }
            case NodeKind::Quantifier: {
                const Node& body = node.children.front();
                std::uint32_t s = from;
                for (int k = 0; k < node.min; ++k) s = build(body, s, ci);
                if (node.max == kUnbounded) {
                    const std::uint32_t loop = add_state();
                    add_edge(s, EdgeKind::Epsilon, loop);
                    const std::uint32_t inner = build(body, loop, ci);
                    add_edge(inner, EdgeKind::Epsilon, loop);
                    const std::uint32_t exit = add_state();
                    add_edge(loop, EdgeKind::Epsilon, exit);
                    return exit;
                }
                if (node.max == node.min) return s;
                const std::uint32_t exit = add_state();
                for (int k = node.min; k < node.max; ++k) {
                    add_edge(s, EdgeKind::Epsilon, exit);
                    s = build(body, s, ci);
                }
                add_edge(s, EdgeKind::Epsilon, exit);
                return exit;
            }
            case NodeKind::CaptureGroup:
            case NodeKind::NonCapturingGroup:
            case NodeKind::NamedGroup: return build(node.children.front(), from, ci);
            case NodeKind::InlineFlags:
                return node.children.empty() ? from : build(node.children.front(), from, true);
            case NodeKind::Backreference:
            case NodeKind::Lookahead:
            case NodeKind::NegativeLookahead:
            case NodeKind::Lookbehind:
            case NodeKind::NegativeLookbehind:
                throw AutomatonError(AutomatonError::Code::NonRegular, "pattern is not regular");
        }
        return from;
    }

private:
    std::size_t cap_;
};

inline SymbolSet word_symbols() {
    SymbolSet s;
    for (char32_t c = 0; c < 128; ++c) {
        if (is_word_char(c)) s.set(c);
    }
    return s;
}

// Context of a product state: class of the previous character and the set of
// things allowed to come next (end of input, a word char, a non-word char).
enum Prev : std::uint8_t { kPrevStart = 0, kPrevWord = 1, kPrevNonWord = 2 };
enum Next : std::uint8_t { kNextEnd = 1, kNextWord = 2, kNextNonWord = 4, kNextAll = 7 };

inline Nfa eliminate_assertions(const ThompsonBuilder& raw, std::uint32_t raw_start, std::uint32_t raw_accept,
                                std::size_t cap) {
    const SymbolSet word = word_symbols();
    const SymbolSet non_word = ~word;
    const bool track_word = raw.has_word_assertion;
    const bool track_start = raw.has_start_assertion;
    auto norm_prev = [&](std::uint8_t p) -> std::uint8_t {
        if (track_word) return p;
        if (track_start) return p == kPrevStart ? kPrevStart : kPrevNonWord;
        return kPrevNonWord;
    };

    Nfa nfa;
    std::unordered_map<std::uint64_t, StateId> ids;
    struct Ctx {
        std::uint32_t raw;
        std::uint8_t prev;
        std::uint8_t next;
    };
    std::vector<Ctx> contexts;
    std::deque<StateId> work;
    auto intern = [&](std::uint32_t q, std::uint8_t p, std::uint8_t m) {
        const std::uint64_t key = (static_cast<std::uint64_t>(q) << 8) | (static_cast<std::uint64_t>(p) << 4) | m;
        auto [it, fresh] = ids.try_emplace(key, static_cast<StateId>(contexts.size()));
        if (fresh) {
            if (contexts.size() >= cap) throw AutomatonError(AutomatonError::Code::TooLarge, "automaton state cap exceeded");
            contexts.push_back({q, p, m});
            work.push_back(it->second);
        }
        return it->second;
    };
    nfa.start = intern(raw_start, norm_prev(kPrevStart), kNextAll);
    std::vector<bool> aux_transition;
    while (!work.empty()) {
        const StateId sid = work.front();
        work.pop_front();
        const Ctx ctx = contexts[sid];
        for (const RawEdge& e : raw.edges[ctx.raw]) {
            auto eps = [&](std::uint8_t next_mask) {
                if (next_mask == 0) return;
                const StateId target = intern(e.to, ctx.prev, next_mask);
                if (target == sid) return;
                nfa.transitions.push_back({sid, target, true, {}});
                aux_transition.push_back(e.auxiliary);
            };
            switch (e.kind) {
                case EdgeKind::Epsilon: eps(ctx.next); break;
                case EdgeKind::AssertStart:
                    if (ctx.prev == kPrevStart) eps(ctx.next);
                    break;
                case EdgeKind::AssertEnd: eps(ctx.next & kNextEnd); break;
                case EdgeKind::WordBoundary:
                    eps(ctx.prev == kPrevWord ? ctx.next & (kNextEnd | kNextNonWord) : ctx.next & kNextWord);
                    break;
                case EdgeKind::NotWordBoundary:
                    eps(ctx.prev == kPrevWord ? ctx.next & kNextWord : ctx.next & (kNextEnd | kNextNonWord));
                    break;
                case EdgeKind::Chars: {
                    SymbolSet allowed = e.label;
                    if (!(ctx.next & kNextWord)) allowed &= non_word;
                    if (!(ctx.next & kNextNonWord)) allowed &= word;
                    if (allowed.none()) break;
                    auto emit = [&](const SymbolSet& part, std::uint8_t prev) {
                        if (part.none()) return;
                        const StateId target = intern(e.to, norm_prev(prev), kNextAll);
                        nfa.transitions.push_back({sid, target, false, part});
                        aux_transition.push_back(e.auxiliary);
                    };
                    if (track_word) {
                        emit(allowed & word, kPrevWord);
                        emit(allowed & non_word, kPrevNonWord);
                    } else {
                        emit(allowed, kPrevNonWord);
                    }
                    break;
                }
            }
        }
    }
    nfa.state_count = contexts.size();
    for (StateId s = 0; s < contexts.size(); ++s) {
        if (contexts[s].raw == raw_accept && (contexts[s].next & kNextEnd)) nfa.accepts.push_back(s);
    }
    nfa.auxiliary_state.resize(contexts.size());
    bool any_aux = false;
    for (StateId s = 0; s < contexts.size(); ++s) {
        nfa.auxiliary_state[s] = raw.auxiliary[contexts[s].raw];
        any_aux = any_aux || nfa.auxiliary_state[s];
    }
    if (any_aux) {
        nfa.auxiliary_transition = std::move(aux_transition);
    } else {
        nfa.auxiliary_state.clear();
    }
    nfa.index();
    return nfa;
}

}  // namespace detail

/// Removes states that are unreachable from start or cannot reach an accept
/// state, renumbering survivors breadth-first from start. An automaton with
/// an empty language becomes a lone start state without accepts.
inline Nfa trim(const Nfa& in) {
    std::vector<bool> forward(in.state_count, false), backward(in.state_count, false);
    std::vector<std::vector<std::uint32_t>> rev(in.state_count);
    for (std::size_t t = 0; t < in.transitions.size(); ++t) rev[in.transitions[t].to].push_back(static_cast<std::uint32_t>(t));
    std::vector<StateId> stack = {in.start};
    forward[in.start] = true;
    while (!stack.empty()) {
        const StateId s = stack.back();
        stack.pop_back();
        for (std::uint32_t t : in.out[s]) {
            const StateId to = in.transitions[t].to;
            if (!forward[to]) forward[to] = true, stack.push_back(to);
        }
    }
    for (StateId a : in.accepts) {
        if (!backward[a]) backward[a] = true, stack.push_back(a);
    }
    while (!stack.empty()) {
        const StateId s = stack.back();
        stack.pop_back();
        for (std::uint32_t t : rev[s]) {
            const StateId from = in.transitions[t].from;
            if (!backward[from]) backward[from] = true, stack.push_back(from);
        }
    }
    Nfa out;
    out.trimmed = true;
    if (!(forward[in.start] && backward[in.start])) {
        out.state_count = 1;
        out.start = 0;
        out.index();
        return out;
    }
    constexpr StateId kNone = std::numeric_limits<StateId>::max();
    std::vector<StateId> remap(in.state_count, kNone);
    std::deque<StateId> queue = {in.start};
    remap[in.start] = 0;
    StateId next_id = 1;
    std::vector<StateId> order = {in.start};
    while (!queue.empty()) {
        const StateId s = queue.front();
        queue.pop_front();
        for (std::uint32_t t : in.out[s]) {
            const StateId to = in.transitions[t].to;
            if (forward[to] && backward[to] && remap[to] == kNone) {
                remap[to] = next_id++;
                order.push_back(to);
                queue.push_back(to);
            }
        }
    }
    out.state_count = next_id;
    out.start = 0;
    const bool aux = !in.auxiliary_state.empty();
    if (aux) out.auxiliary_state.resize(next_id);
    for (StateId old : order) {
        if (aux) out.auxiliary_state[remap[old]] = in.auxiliary_state[old];
        for (std::uint32_t t : in.out[old]) {
            const Transition& tr = in.transitions[t];
            if (remap[tr.to] == kNone) continue;
            out.transitions.push_back({remap[old], remap[tr.to], tr.epsilon, tr.label});
            if (aux) out.auxiliary_transition.push_back(in.auxiliary_transition[t]);
        }
    }
    for (StateId a : in.accepts) {
        if (remap[a] != kNone) out.accepts.push_back(remap[a]);
    }
    std::sort(out.accepts.begin(), out.accepts.end());
    out.index();
    return out;
}

/// Thompson construction followed by assertion elimination and trimming.
/// The result accepts exactly the full-match language of the pattern over
/// the ASCII projection (or the search language in partial mode).
inline Nfa build_nfa(const RegexAst& ast, const NfaOptions& options = {}) {
    if (classify_regularity(ast) == RegularityClass::Extended) {
        throw AutomatonError(AutomatonError::Code::NonRegular, "pattern is not regular");
    }
    bool global_ci = false;
    const auto& top = ast.root.kind == NodeKind::Concat ? ast.root.children : std::vector<Node>{ast.root};
    for (const Node& n : top) {
        if (n.kind == NodeKind::InlineFlags && n.children.empty()) global_ci = true;
    }
    detail::ThompsonBuilder raw(options.state_cap);
    std::uint32_t start = 0, accept = 0;
    if (options.mode == MatchMode::Full) {
        start = raw.add_state();
        accept = raw.build(ast.root, start, global_ci);
    } else {
        SymbolSet sigma;
        sigma.set();
        start = raw.add_state(true);
        raw.add_edge(start, detail::EdgeKind::Chars, start, sigma, true);
        const std::uint32_t core = raw.add_state();
        raw.add_edge(start, detail::EdgeKind::Epsilon, core, {}, true);
        const std::uint32_t core_end = raw.build(ast.root, core, global_ci);
        accept = raw.add_state(true);
        raw.add_edge(core_end, detail::EdgeKind::Epsilon, accept, {}, true);
        raw.add_edge(accept, detail::EdgeKind::Chars, accept, sigma, true);
    }
    Nfa nfa = detail::eliminate_assertions(raw, start, accept, options.state_cap);
    return options.trim ? trim(nfa) : nfa;
}

/// States plus transitions, each character-class transition counted once per
/// constituent symbol.
inline std::size_t nfa_size(const Nfa& nfa) {
    std::size_t size = nfa.state_count;
    for (const Transition& t : nfa.transitions) size += t.epsilon ? 1 : t.label.count();
    return size;
}

struct TraceResult {
    bool accepted = false;
    std::vector<bool> visited_states;
    std::vector<bool> visited_transitions;
};

namespace detail {

inline void close_over_epsilon(const Nfa& nfa, std::vector<StateId>& live, std::vector<bool>& in_live,
                               TraceResult& trace) {
    for (std::size_t k = 0; k < live.size(); ++k) {
        const StateId s = live[k];
        for (std::uint32_t t : nfa.out[s]) {
            const Transition& tr = nfa.transitions[t];
            if (!tr.epsilon) continue;
            trace.visited_transitions[t] = true;
            trace.visited_states[tr.to] = true;
            if (!in_live[tr.to]) {
                in_live[tr.to] = true;
                live.push_back(tr.to);
            }
        }
    }
}

}  // namespace detail

/// Breadth-first multi-state simulation recording every state and transition
/// touched before the live set empties or the input ends.
inline TraceResult simulate(const Nfa& nfa, std::u32string_view input) {
    TraceResult trace;
    trace.visited_states.assign(nfa.state_count, false);
    trace.visited_transitions.assign(nfa.transitions.size(), false);
    std::vector<StateId> live = {nfa.start};
    std::vector<bool> in_live(nfa.state_count, false);
    in_live[nfa.start] = true;
    trace.visited_states[nfa.start] = true;
    detail::close_over_epsilon(nfa, live, in_live, trace);
    std::vector<StateId> next;
    std::vector<bool> in_next(nfa.state_count, false);
    for (char32_t c : input) {
        const std::size_t sym = symbol_of(c);
        next.clear();
        for (StateId s : live) {
            for (std::uint32_t t : nfa.out[s]) {
                const Transition& tr = nfa.transitions[t];
                if (tr.epsilon || !tr.label.test(sym)) continue;
                trace.visited_transitions[t] = true;
                trace.visited_states[tr.to] = true;
                if (!in_next[tr.to]) {
                    in_next[tr.to] = true;
                    next.push_back(tr.to);
                }
            }
        }
        for (StateId s : live) in_live[s] = false;
        live.swap(next);
        in_live.swap(in_next);
        if (live.empty()) return trace;
        detail::close_over_epsilon(nfa, live, in_live, trace);
    }
    for (StateId s : live) {
        if (nfa.accepting[s]) trace.accepted = true;
    }
    return trace;
}

inline TraceResult simulate(const Nfa& nfa, std::string_view input) { return simulate(nfa, std::u32string_view(to_u32(input))); }

inline bool accepts(const Nfa& nfa, std::u32string_view input) { return simulate(nfa, input).accepted; }

/// How visited parts of the automaton are weighed into a coverage fraction.
enum class CoverageMeasure : std::uint8_t {
    StatesAndTransitions,  // default: symbolic transitions count once
    StatesOnly,
    ExpandedTransitions,   // transitions weighted by label size
};

struct CoverageOptions {
    bool include_negatives = true;
    CoverageMeasure measure = CoverageMeasure::StatesAndTransitions;
};

/// Fraction of the automaton (outside any search wrapper) touched by
/// simulating every example string.
inline double coverage(const Nfa& nfa, const std::vector<std::u32string>& positives,
                       const std::vector<std::u32string>& negatives, const CoverageOptions& options = {}) {
    std::vector<bool> states(nfa.state_count, false), transitions(nfa.transitions.size(), false);
    auto absorb = [&](const std::u32string& s) {
        const TraceResult trace = simulate(nfa, s);
        for (std::size_t k = 0; k < states.size(); ++k) states[k] = states[k] || trace.visited_states[k];
        for (std::size_t k = 0; k < transitions.size(); ++k) transitions[k] = transitions[k] || trace.visited_transitions[k];
    };
    for (const auto& s : positives) absorb(s);
    if (options.include_negatives) {
        for (const auto& s : negatives) absorb(s);
    }
    std::size_t covered = 0, total = 0;
    for (StateId s = 0; s < nfa.state_count; ++s) {
        if (nfa.is_auxiliary_state(s)) continue;
        ++total;
        covered += states[s] ? 1 : 0;
    }
    if (options.measure != CoverageMeasure::StatesOnly) {
        for (std::size_t t = 0; t < nfa.transitions.size(); ++t) {
            if (nfa.is_auxiliary_transition(t)) continue;
            const Transition& tr = nfa.transitions[t];
            const std::size_t weight =
                options.measure == CoverageMeasure::ExpandedTransitions && !tr.epsilon ? tr.label.count() : 1;
            total += weight;
            covered += transitions[t] ? weight : 0;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total);
}

inline double coverage(const Nfa& nfa, const std::vector<std::string>& positives,
                       const std::vector<std::string>& negatives, const CoverageOptions& options = {}) {
    std::vector<std::u32string> p, n;
    for (const auto& s : positives) p.push_back(to_u32(s));
    for (const auto& s : negatives) n.push_back(to_u32(s));
    return coverage(nfa, p, n, options);
}

/// Representative of a label: smallest printable ASCII member, else the
/// smallest member.
inline char32_t representative(const SymbolSet& label) {
    for (std::size_t c = 0x20; c < 0x7F; ++c) {
        if (label.test(c)) return static_cast<char32_t>(c);
    }
    for (std::size_t c = 0; c < kAlphabetSize; ++c) {
        if (label.test(c)) return symbol_char(c);
    }
    return 0;
}

inline constexpr std::size_t kDefaultCoveringCap = 500;

/// One accepted string per non-epsilon transition, built from the shortest
/// path into the transition, its representative character and the shortest
/// path to acceptance. Deduplicated, in transition-id order, at most cap.
inline std::vector<std::u32string> covering_strings(const Nfa& nfa, std::size_t cap = kDefaultCoveringCap) {
    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
    const std::size_t n = nfa.state_count;
    std::vector<std::vector<std::uint32_t>> rev(n);
    for (std::size_t t = 0; t < nfa.transitions.size(); ++t) rev[nfa.transitions[t].to].push_back(static_cast<std::uint32_t>(t));

    // 0-1 BFS: epsilon edges cost 0, character edges cost 1.
    auto zero_one_bfs = [&](bool forward, std::vector<std::size_t>& dist, std::vector<std::int64_t>& via) {
        dist.assign(n, kInf);
        via.assign(n, -1);
        std::deque<StateId> dq;
        if (forward) {
            dist[nfa.start] = 0;
            dq.push_back(nfa.start);
        } else {
            for (StateId a : nfa.accepts) {
                dist[a] = 0;
                dq.push_back(a);
            }
        }
        std::vector<bool> done(n, false);
        while (!dq.empty()) {
            const StateId s = dq.front();
            dq.pop_front();
            if (done[s]) continue;
            done[s] = true;
            const auto& edges = forward ? nfa.out[s] : rev[s];
            for (std::uint32_t t : edges) {
                const Transition& tr = nfa.transitions[t];
                const StateId other = forward ? tr.to : tr.from;
                const std::size_t w = tr.epsilon ? 0 : 1;
                if (dist[s] + w < dist[other]) {
                    dist[other] = dist[s] + w;
                    via[other] = t;
                    if (w == 0) dq.push_front(other); else dq.push_back(other);
                }
            }
        }
    };
    std::vector<std::size_t> from_start, to_accept;
    std::vector<std::int64_t> in_edge, out_edge;
    zero_one_bfs(true, from_start, in_edge);
    zero_one_bfs(false, to_accept, out_edge);

    auto prefix = [&](StateId s) {
        std::u32string p;
        while (in_edge[s] >= 0) {
            const Transition& tr = nfa.transitions[static_cast<std::size_t>(in_edge[s])];
            if (!tr.epsilon) p.push_back(representative(tr.label));
            s = tr.from;
        }
        return std::u32string(p.rbegin(), p.rend());
    };
    auto suffix = [&](StateId s) {
        std::u32string p;
        while (out_edge[s] >= 0) {
            const Transition& tr = nfa.transitions[static_cast<std::size_t>(out_edge[s])];
            if (!tr.epsilon) p.push_back(representative(tr.label));
            s = tr.to;
        }
        return p;
    };

    std::vector<std::u32string> out;
    std::unordered_map<std::u32string, bool> seen;
    bool any_symbolic = false;
    for (std::size_t t = 0; t < nfa.transitions.size() && out.size() < cap; ++t) {
        const Transition& tr = nfa.transitions[t];
        if (tr.epsilon || nfa.is_auxiliary_transition(t)) continue;
        any_symbolic = true;
        if (from_start[tr.from] == kInf || to_accept[tr.to] == kInf) continue;
        std::u32string s = prefix(tr.from);
        s.push_back(representative(tr.label));
        s += suffix(tr.to);
        if (seen.emplace(s, true).second) out.push_back(std::move(s));
    }
    if (!any_symbolic && !nfa.accepts.empty() && cap > 0) out.push_back(U"");
    return out;
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_NFA_HPP
