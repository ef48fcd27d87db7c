#ifndef REGEX_FORGE_METRICS_HPP
#define REGEX_FORGE_METRICS_HPP

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "regex_forge/features.hpp"
#include "regex_forge/matcher.hpp"
#include "regex_forge/nfa.hpp"
#include "regex_forge/parser.hpp"
#include "regex_forge/task.hpp"
#include "regex_forge/tree_edit_distance.hpp"

namespace regex_forge {

struct MetricConfig {
    MatchMode mode = MatchMode::Partial;
    MatchLimits limits;
    std::size_t covering_cap = kDefaultCoveringCap;
    std::size_t state_cap = 50'000;
    CoverageOptions strictness;
};

struct AccuracyResult {
    double value = 0.0;
    std::size_t satisfied = 0;
    std::size_t total = 0;
    std::size_t timeouts = 0;  // timeout or unsupported verdicts
};

/// Table-style accuracy: satisfied positives plus rejected negatives over all
/// examples. A verdict that is neither match nor no-match leaves its example
/// unsatisfied.
inline AccuracyResult evaluate_accuracy(const CompiledRegex& regex, const std::vector<std::string>& positives,
                                        const std::vector<std::string>& negatives, MatchMode mode,
                                        const MatchLimits& limits = {}) {
    if (positives.empty() && negatives.empty()) throw std::invalid_argument("accuracy needs at least one example");
    AccuracyResult out;
    auto run = [&](const std::string& s, Verdict wanted) {
        const MatchOutcome o = regex.match(to_u32(s), mode, limits);
        if (!o.completed()) ++out.timeouts;
        if (o.verdict == wanted) ++out.satisfied;
        ++out.total;
    };
    for (const auto& s : positives) run(s, Verdict::Match);
    for (const auto& s : negatives) run(s, Verdict::NoMatch);
    out.value = static_cast<double>(out.satisfied) / static_cast<double>(out.total);
    return out;
}

inline double accuracy(const RegexAst& ast, const std::vector<std::string>& positives,
                       const std::vector<std::string>& negatives, MatchMode mode, const MatchLimits& limits = {}) {
    return evaluate_accuracy(CompiledRegex(ast), positives, negatives, mode, limits).value;
}

/// Fraction of the pooled covering strings of both automata accepted by both.
/// Both automata must describe full-match languages.
inline double semantic_similarity(const Nfa& r, const std::vector<std::u32string>& r_cover, const Nfa& g,
                                  const std::vector<std::u32string>& g_cover) {
    std::set<std::u32string> pool(r_cover.begin(), r_cover.end());
    pool.insert(g_cover.begin(), g_cover.end());
    if (pool.empty()) return 1.0;
    std::size_t both = 0;
    for (const auto& s : pool) both += (accepts(r, s) && accepts(g, s)) ? 1 : 0;
    return static_cast<double>(both) / static_cast<double>(pool.size());
}

inline double semantic_similarity(const Nfa& r, const Nfa& g, std::size_t cap = kDefaultCoveringCap) {
    return semantic_similarity(r, covering_strings(r, cap), g, covering_strings(g, cap));
}

inline std::optional<Nfa> try_build_nfa(const RegexAst& ast, const NfaOptions& options = {}) {
    try {
        return build_nfa(ast, options);
    } catch (const AutomatonError&) {
        return std::nullopt;
    }
}

/// Absent when either pattern has no automaton (extended or over the cap).
inline std::optional<double> semantic_similarity(const RegexAst& r, const RegexAst& g,
                                                 std::size_t cap = kDefaultCoveringCap) {
    const auto rn = try_build_nfa(r), gn = try_build_nfa(g);
    if (!rn || !gn) return std::nullopt;
    return semantic_similarity(*rn, *gn, cap);
}

/// Per-candidate measurements. Optional fields are absent when the pattern
/// has no automaton or no ground truth was supplied.
struct MetricBundle {
    std::size_t pattern_length = 0;
    std::size_t feature_count = 0;
    std::optional<std::size_t> nfa_size;
    std::optional<std::size_t> ted_to_ground;
    std::optional<double> semantic_similarity;
    double accuracy = 0.0;
    std::optional<double> strictness;
    std::chrono::nanoseconds generation_time{0};
    std::size_t timeouts = 0;
};

/// A parsed pattern with the derived artifacts the metrics reuse.
struct PreparedPattern {
    std::string pattern;
    RegexAst ast;
    CompiledRegex program;
    std::optional<Nfa> nfa;         // full-match automaton
    std::optional<Nfa> search_nfa;  // wrapped automaton, partial mode only
    std::vector<std::u32string> covering;

    bool regular() const { return nfa.has_value(); }
    const Nfa* strictness_nfa() const { return search_nfa ? &*search_nfa : nfa ? &*nfa : nullptr; }
};

/// Throws ParseError on an unparseable pattern.
inline PreparedPattern prepare_pattern(std::string pattern, const MetricConfig& config = {}) {
    PreparedPattern p;
    p.ast = parse(pattern);
    p.pattern = std::move(pattern);
    p.program = CompiledRegex(p.ast);
    NfaOptions options;
    options.state_cap = config.state_cap;
    p.nfa = try_build_nfa(p.ast, options);
    if (p.nfa) {
        p.covering = covering_strings(*p.nfa, config.covering_cap);
        if (config.mode == MatchMode::Partial) {
            options.mode = MatchMode::Partial;
            p.search_nfa = try_build_nfa(p.ast, options);
        }
    }
    return p;
}

inline std::optional<double> strictness(const PreparedPattern& p, const std::vector<std::string>& positives,
                                        const std::vector<std::string>& negatives, const CoverageOptions& options = {}) {
    const Nfa* nfa = p.strictness_nfa();
    if (!nfa) return std::nullopt;
    return coverage(*nfa, positives, negatives, options);
}

inline MetricBundle measure_candidate(const PreparedPattern& candidate, const CompositionTask& task,
                                      const PreparedPattern* ground, std::chrono::nanoseconds timing,
                                      const MetricConfig& config = {}) {
    MetricBundle b;
    b.pattern_length = pattern_length(candidate.pattern);
    b.feature_count = feature_count(candidate.ast);
    if (candidate.nfa) b.nfa_size = nfa_size(*candidate.nfa);
    if (ground) {
        b.ted_to_ground = syntactic_distance(candidate.ast, ground->ast);
        if (candidate.nfa && ground->nfa) {
            b.semantic_similarity = semantic_similarity(*candidate.nfa, candidate.covering, *ground->nfa, ground->covering);
        }
    }
    const AccuracyResult acc =
        evaluate_accuracy(candidate.program, task.positives, task.negatives, config.mode, config.limits);
    b.accuracy = acc.value;
    b.timeouts = acc.timeouts;
    b.strictness = strictness(candidate, task.positives, task.negatives, config.strictness);
    b.generation_time = timing;
    return b;
}

/// Convenience form: parses both the candidate and the task's ground truth.
inline MetricBundle measure_candidate(const std::string& candidate, const CompositionTask& task,
                                      std::chrono::nanoseconds timing, const MetricConfig& config = {}) {
    const PreparedPattern c = prepare_pattern(candidate, config);
    const PreparedPattern g = prepare_pattern(task.ground_truth, config);
    return measure_candidate(c, task, &g, timing, config);
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_METRICS_HPP
