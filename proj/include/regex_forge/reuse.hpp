#ifndef REGEX_FORGE_REUSE_HPP
#define REGEX_FORGE_REUSE_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "regex_forge/corpus.hpp"
#include "regex_forge/metrics.hpp"

namespace regex_forge {

enum class RankOrder : std::uint8_t { StrictFirst, LooseFirst, None };

constexpr std::string_view rank_order_name(RankOrder r) {
    switch (r) {
        case RankOrder::StrictFirst: return "strict-first";
        case RankOrder::LooseFirst: return "loose-first";
        case RankOrder::None: return "none";
    }
    return "?";
}

inline std::optional<RankOrder> parse_rank_order(std::string_view s) {
    if (s == "strict-first") return RankOrder::StrictFirst;
    if (s == "loose-first") return RankOrder::LooseFirst;
    if (s == "none") return RankOrder::None;
    return std::nullopt;
}

class QueryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Query {
    std::vector<std::string> positives;
    std::vector<std::string> negatives;
    MatchMode mode = MatchMode::Partial;
    RankOrder rank = RankOrder::StrictFirst;
    std::optional<std::size_t> limit;
    SourceMask sources = kAllSources;
    std::vector<std::string> exclusions;
};

/// Throws QueryError when there are no positives or a string is both a
/// positive and a negative.
inline void validate(const Query& q) {
    if (q.positives.empty()) throw QueryError("query needs at least one positive example");
    for (const auto& p : q.positives) {
        if (std::find(q.negatives.begin(), q.negatives.end(), p) != q.negatives.end()) {
            throw QueryError("example is both positive and negative: " + p);
        }
    }
}

/// Adds examples to a query. Duplicates are dropped.
inline Query refine(const Query& previous, const std::vector<std::string>& add_positives,
                    const std::vector<std::string>& add_negatives) {
    Query q = previous;
    auto merge = [](std::vector<std::string>& into, const std::vector<std::string>& extra) {
        for (const auto& s : extra) {
            if (std::find(into.begin(), into.end(), s) == into.end()) into.push_back(s);
        }
    };
    merge(q.positives, add_positives);
    merge(q.negatives, add_negatives);
    validate(q);
    return q;
}

struct EngineConfig {
    MatchLimits limits;
    CoverageOptions strictness;
    std::size_t state_cap = 50'000;
    std::chrono::milliseconds wall_cap{60'000};
    std::size_t workers = 0;  // 0 = hardware concurrency
    bool prefilter = false;
};

struct QueryStats {
    std::size_t scanned = 0;  // entries evaluated
    std::size_t pruned = 0;   // entries skipped by the prefilter
    std::size_t matched = 0;  // candidates before the limit
    std::size_t timeouts = 0;
    std::chrono::nanoseconds elapsed{0};
    bool truncated = false;
};

struct CandidateResult {
    const StoredEntry* entry = nullptr;
    MetricBundle bundle;
    std::size_t rank_position = 0;
};

struct QueryResult {
    std::vector<CandidateResult> candidates;
    QueryStats stats;
};

enum class Satisfaction : std::uint8_t { Satisfied, Rejected, TimedOut };

/// Checks one compiled pattern against the examples, shortest first, stopping
/// at the first failure.
inline Satisfaction satisfies(const CompiledRegex& program, const std::vector<std::pair<std::u32string, bool>>& ordered,
                              MatchMode mode, const MatchLimits& limits) {
    for (const auto& [input, positive] : ordered) {
        const MatchOutcome o = program.match(input, mode, limits);
        if (!o.completed()) return Satisfaction::TimedOut;
        if ((o.verdict == Verdict::Match) != positive) return Satisfaction::Rejected;
    }
    return Satisfaction::Satisfied;
}

inline std::vector<std::pair<std::u32string, bool>> ordered_examples(const Query& q) {
    std::vector<std::pair<std::u32string, bool>> out;
    for (const auto& s : q.positives) out.emplace_back(to_u32(s), true);
    for (const auto& s : q.negatives) out.emplace_back(to_u32(s), false);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first.size() < b.first.size(); });
    return out;
}

/// Strict-first sorts by strictness descending, loose-first ascending; both
/// break ties by pattern length then id. Candidates without a strictness
/// score follow in id order. RankOrder::None keeps id order.
inline void rank_by_strictness(std::vector<CandidateResult>& candidates, RankOrder order) {
    auto id = [](const CandidateResult& c) { return c.entry->entry.id; };
    std::stable_sort(candidates.begin(), candidates.end(), [&](const CandidateResult& a, const CandidateResult& b) {
        if (order == RankOrder::None) return id(a) < id(b);
        const auto& sa = a.bundle.strictness;
        const auto& sb = b.bundle.strictness;
        if (sa.has_value() != sb.has_value()) return sa.has_value();
        if (!sa) return id(a) < id(b);
        if (*sa != *sb) return order == RankOrder::StrictFirst ? *sa > *sb : *sa < *sb;
        if (a.bundle.pattern_length != b.bundle.pattern_length) return a.bundle.pattern_length < b.bundle.pattern_length;
        return id(a) < id(b);
    });
    for (std::size_t k = 0; k < candidates.size(); ++k) candidates[k].rank_position = k;
}

/// Picks up to k candidates spread over strictness deciles, round robin from
/// the strictest decile down, keeping ranked order in the output.
inline std::vector<CandidateResult> spread_sample(const std::vector<CandidateResult>& ranked, std::size_t k) {
    if (ranked.size() <= k) return ranked;
    std::vector<std::vector<std::size_t>> deciles(11);  // index 10 holds unscored candidates
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& s = ranked[i].bundle.strictness;
        const std::size_t d = s ? std::min<std::size_t>(9, static_cast<std::size_t>(*s * 10.0)) : 10;
        deciles[d].push_back(i);
    }
    std::vector<std::size_t> chosen;
    std::vector<std::size_t> next(deciles.size(), 0);
    while (chosen.size() < k) {
        for (std::size_t d = deciles.size(); d-- > 0 && chosen.size() < k;) {
            if (next[d] < deciles[d].size()) chosen.push_back(deciles[d][next[d]++]);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<CandidateResult> out;
    for (std::size_t i : chosen) {
        out.push_back(ranked[i]);
        out.back().rank_position = out.size() - 1;
    }
    return out;
}

/// Metrics of a satisfying corpus entry; no ground truth is involved.
inline MetricBundle measure_match(const StoredEntry& e, const Query& q, const EngineConfig& config) {
    MetricBundle b;
    const RegexAst ast = parse(e.entry.pattern);
    b.pattern_length = pattern_length(e.entry.pattern);
    b.feature_count = feature_count(ast);
    b.accuracy = 1.0;
    NfaOptions options;
    options.state_cap = config.state_cap;
    if (auto nfa = try_build_nfa(ast, options)) {
        b.nfa_size = nfa_size(*nfa);
        if (q.mode == MatchMode::Full) {
            b.strictness = coverage(*nfa, q.positives, q.negatives, config.strictness);
        } else {
            options.mode = MatchMode::Partial;
            if (auto search = try_build_nfa(ast, options)) {
                b.strictness = coverage(*search, q.positives, q.negatives, config.strictness);
            }
        }
    }
    return b;
}

using CandidateCallback = std::function<void(const StoredEntry&)>;

/// Scans the view for entries that match every positive and reject every
/// negative. Candidates are ranked per q.rank and cut to q.limit; the stats
/// record the scan size, timeouts and elapsed time. on_match (optional) sees
/// each satisfying entry as it is found, from worker threads, serialized.
inline QueryResult run_query(const CorpusView& base, const Query& q, const EngineConfig& config = {},
                             const std::atomic<bool>* cancel = nullptr, const CandidateCallback& on_match = {}) {
    validate(q);
    const auto started = std::chrono::steady_clock::now();
    const auto deadline = started + config.wall_cap;

    CorpusView view = base.with_sources(q.sources & base.sources());
    for (const auto& p : q.exclusions) view = view.exclude(p);

    QueryResult result;
    const QueryHints hints{q.positives, q.mode};
    const std::vector<const StoredEntry*> all = view.scan();
    std::vector<const StoredEntry*> work;
    if (config.prefilter) {
        work = view.scan(&hints);
        result.stats.pruned = all.size() - work.size();
    } else {
        work = all;
    }

    const auto examples = ordered_examples(q);
    std::size_t workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::max<std::size_t>(1, std::min(workers, work.size() / 64 + 1));

    std::vector<std::vector<std::size_t>> hits(workers);
    std::vector<std::size_t> scanned(workers, 0), timeouts(workers, 0);
    std::atomic<bool> stop{false};
    std::mutex callback_lock;
    auto run_chunk = [&](std::size_t w) {
        const std::size_t lo = work.size() * w / workers, hi = work.size() * (w + 1) / workers;
        for (std::size_t i = lo; i < hi; ++i) {
            if (stop.load(std::memory_order_relaxed)) return;
            if ((cancel && cancel->load()) || std::chrono::steady_clock::now() > deadline) {
                stop = true;
                return;
            }
            ++scanned[w];
            switch (satisfies(work[i]->program, examples, q.mode, config.limits)) {
                case Satisfaction::Satisfied:
                    hits[w].push_back(i);
                    if (on_match) {
                        std::lock_guard<std::mutex> guard(callback_lock);
                        on_match(*work[i]);
                    }
                    break;
                case Satisfaction::TimedOut: ++timeouts[w]; break;
                case Satisfaction::Rejected: break;
            }
        }
    };
    if (workers == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run_chunk, w);
        for (auto& t : pool) t.join();
    }
    result.stats.truncated = stop.load();

    for (std::size_t w = 0; w < workers; ++w) {
        result.stats.scanned += scanned[w];
        result.stats.timeouts += timeouts[w];
        for (std::size_t i : hits[w]) {
            CandidateResult c;
            c.entry = work[i];
            c.bundle = measure_match(*work[i], q, config);
            result.candidates.push_back(std::move(c));
        }
    }
    result.stats.matched = result.candidates.size();
    rank_by_strictness(result.candidates, q.rank);
    if (q.limit && result.candidates.size() > *q.limit) result.candidates.resize(*q.limit);
    result.stats.elapsed = std::chrono::steady_clock::now() - started;
    for (auto& c : result.candidates) c.bundle.generation_time = result.stats.elapsed;
    return result;
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_REUSE_HPP
