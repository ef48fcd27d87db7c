#ifndef REGEX_FORGE_GATEWAY_HPP
#define REGEX_FORGE_GATEWAY_HPP

#include <atomic>
#include <chrono>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "regex_forge/bench.hpp"
#include "regex_forge/corpus.hpp"
#include "regex_forge/metrics.hpp"
#include "regex_forge/reuse.hpp"

namespace regex_forge {

/// A request the gateway refuses, with the HTTP status to report.
class RequestError : public std::runtime_error {
public:
    RequestError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

struct GatewayConfig {
    EngineConfig engine;
    MetricConfig metrics;
    std::size_t default_limit = 50;
};

struct ApiQueryRequest {
    Query query;
    bool spread = false;
    bool stream = false;
};

inline std::string format_id(std::uint64_t id) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(id));
    return buf;
}

inline std::optional<std::uint64_t> parse_id(std::string_view s) {
    if (s.empty() || s.size() > 16) return std::nullopt;
    std::uint64_t v = 0;
    for (char c : s) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else return std::nullopt;
        v = v * 16 + static_cast<std::uint64_t>(d);
    }
    return v;
}

inline std::optional<MatchMode> parse_match_mode(std::string_view s) {
    if (s == "partial") return MatchMode::Partial;
    if (s == "full") return MatchMode::Full;
    return std::nullopt;
}

namespace detail {

inline std::vector<std::string> string_list(const nlohmann::json& body, const char* key, bool required) {
    std::vector<std::string> out;
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) {
        if (required) throw RequestError(400, std::string("missing field: ") + key);
        return out;
    }
    if (!it->is_array()) throw RequestError(400, std::string(key) + " must be a list of strings");
    for (const auto& s : *it) {
        if (!s.is_string()) throw RequestError(400, std::string(key) + " must be a list of strings");
        out.push_back(s.get<std::string>());
    }
    return out;
}

inline MatchMode mode_field(const nlohmann::json& body) {
    if (!body.contains("mode") || body["mode"].is_null()) return MatchMode::Partial;
    const auto m = body["mode"].is_string() ? parse_match_mode(body["mode"].get<std::string>()) : std::nullopt;
    if (!m) throw RequestError(400, "mode must be \"partial\" or \"full\"");
    return *m;
}

inline nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }
inline nlohmann::json opt(const std::optional<std::size_t>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace detail

inline ApiQueryRequest parse_query_request(const nlohmann::json& body, const GatewayConfig& config = {}) {
    if (!body.is_object()) throw RequestError(400, "request body must be a JSON object");
    ApiQueryRequest r;
    r.query.positives = detail::string_list(body, "positives", true);
    r.query.negatives = detail::string_list(body, "negatives", false);
    r.query.mode = detail::mode_field(body);
    if (body.contains("rank") && !body["rank"].is_null()) {
        const auto rank = body["rank"].is_string() ? parse_rank_order(body["rank"].get<std::string>()) : std::nullopt;
        if (!rank) throw RequestError(400, "rank must be strict-first, loose-first or none");
        r.query.rank = *rank;
    }
    r.query.limit = config.default_limit;
    if (body.contains("limit")) {
        const auto& l = body["limit"];
        if (l.is_null()) r.query.limit.reset();
        else if (l.is_number_unsigned() && l.get<std::size_t>() > 0) r.query.limit = l.get<std::size_t>();
        else throw RequestError(400, "limit must be a positive integer or null");
    }
    if (body.contains("sources") && !body["sources"].is_null()) {
        SourceMask mask = 0;
        for (const auto& name : detail::string_list(body, "sources", false)) {
            const auto s = parse_corpus_source(name);
            if (!s) throw RequestError(400, "unknown source: " + name);
            mask |= source_bit(*s);
        }
        r.query.sources = mask;
    }
    r.query.exclusions = detail::string_list(body, "exclude", false);
    auto flag = [&](const char* key) {
        if (!body.contains(key) || body[key].is_null()) return false;
        if (!body[key].is_boolean()) throw RequestError(400, std::string(key) + " must be a boolean");
        return body[key].get<bool>();
    };
    r.spread = flag("spread");
    r.stream = flag("stream");
    try {
        validate(r.query);
    } catch (const QueryError& e) {
        throw RequestError(400, e.what());
    }
    return r;
}

inline nlohmann::json candidate_json(const CandidateResult& c) {
    const RegexEntry& e = c.entry->entry;
    return {{"id", format_id(e.id)},
            {"pattern", e.pattern},
            {"source", corpus_source_name(e.source())},
            {"origin", e.origin()},
            {"accuracy", c.bundle.accuracy},
            {"strictness", detail::opt(c.bundle.strictness)},
            {"pattern_length", c.bundle.pattern_length},
            {"feature_count", c.bundle.feature_count},
            {"nfa_size", detail::opt(c.bundle.nfa_size)},
            {"rank_position", c.rank_position}};
}

inline nlohmann::json query_stats_json(const QueryStats& s) {
    return {{"scanned", s.scanned},
            {"pruned", s.pruned},
            {"matched", s.matched},
            {"timeouts", s.timeouts},
            {"elapsed_ms", std::chrono::duration<double, std::milli>(s.elapsed).count()},
            {"truncated", s.truncated}};
}

/// Runs a parsed request. Spread presentation samples the limit across
/// strictness deciles of the full ranked list.
inline QueryResult execute_query(const CorpusStore& store, const ApiQueryRequest& req, const GatewayConfig& config,
                                 const std::atomic<bool>* cancel = nullptr, const CandidateCallback& on_match = {}) {
    Query q = req.query;
    const auto limit = q.limit;
    if (req.spread) q.limit.reset();
    QueryResult r = run_query(store.view(), q, config.engine, cancel, on_match);
    if (req.spread && limit) r.candidates = spread_sample(r.candidates, *limit);
    return r;
}

inline nlohmann::json query_result_json(const QueryResult& r) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : r.candidates) list.push_back(candidate_json(c));
    return {{"candidates", list}, {"stats", query_stats_json(r.stats)}};
}

inline nlohmann::json corpus_stats_json(const CorpusStats& stats) {
    nlohmann::json out = nlohmann::json::object();
    auto row = [](const SourceStats& s) { return nlohmann::json{{"targets", s.targets}, {"found", s.found}, {"unique", s.unique}}; };
    for (std::size_t s = 0; s < kCorpusSourceCount; ++s) {
        out[std::string(corpus_source_name(static_cast<CorpusSource>(s)))] = row(stats.per_source[s]);
    }
    out["total"] = row(stats.total());
    return out;
}

inline nlohmann::json health_json(const CorpusStore& store) {
    return {{"status", "ok"}, {"entries", store.size()}, {"stats", corpus_stats_json(store.stats())}};
}

inline nlohmann::json entry_json(const StoredEntry& e) {
    nlohmann::json prov = nlohmann::json::array();
    for (const auto& p : e.entry.provenance) prov.push_back({{"source", corpus_source_name(p.source)}, {"origin", p.origin}});
    nlohmann::json out = {{"id", format_id(e.entry.id)},
                          {"pattern", e.entry.pattern},
                          {"parse_status", parse_status_name(e.entry.parse_status)},
                          {"regularity", e.entry.regularity ? nlohmann::json(regularity_name(*e.entry.regularity))
                                                            : nlohmann::json(nullptr)},
                          {"provenance", prov},
                          {"pattern_length", pattern_length(e.entry.pattern)},
                          {"feature_count", nullptr},
                          {"nfa_size", nullptr}};
    if (e.entry.parse_status == ParseStatus::Ok) {
        const RegexAst ast = parse(e.entry.pattern);
        out["feature_count"] = feature_count(ast);
        if (auto nfa = try_build_nfa(ast)) out["nfa_size"] = nfa_size(*nfa);
    }
    return out;
}

/// Side-by-side measurements of two patterns: each one's bundle with the
/// other as reference, plus the symmetric distance and overlap. Accuracy and
/// strictness need examples and are null without them.
inline nlohmann::json compare_patterns(const std::string& a, const std::string& b, const std::vector<std::string>& positives,
                                       const std::vector<std::string>& negatives, MatchMode mode,
                                       const MetricConfig& base = {}) {
    MetricConfig config = base;
    config.mode = mode;
    auto prepared = [&](const std::string& p, const char* which) {
        try {
            return prepare_pattern(p, config);
        } catch (const ParseError& e) {
            throw RequestError(422, std::string("pattern ") + which + " does not parse: " + e.what());
        }
    };
    const PreparedPattern pa = prepared(a, "a"), pb = prepared(b, "b");
    const bool have_examples = !positives.empty() || !negatives.empty();
    auto side = [&](const PreparedPattern& self, const PreparedPattern& other) {
        nlohmann::json j = {{"pattern", self.pattern},
                            {"regularity", regularity_name(classify_regularity(self.ast))},
                            {"pattern_length", pattern_length(self.pattern)},
                            {"feature_count", feature_count(self.ast)},
                            {"nfa_size", self.nfa ? nlohmann::json(nfa_size(*self.nfa)) : nlohmann::json(nullptr)},
                            {"accuracy", nullptr},
                            {"strictness", nullptr},
                            {"timeouts", 0}};
        if (have_examples) {
            const CompositionTask task{"", other.pattern, positives, negatives, TaskSource::Oss};
            const MetricBundle bundle = measure_candidate(self, task, &other, {}, config);
            j["accuracy"] = bundle.accuracy;
            j["strictness"] = detail::opt(bundle.strictness);
            j["timeouts"] = bundle.timeouts;
        }
        return j;
    };
    std::optional<double> similarity;
    if (pa.nfa && pb.nfa) similarity = semantic_similarity(*pa.nfa, pa.covering, *pb.nfa, pb.covering);
    return {{"a", side(pa, pb)},
            {"b", side(pb, pa)},
            {"ted", syntactic_distance(pa.ast, pb.ast)},
            {"semantic_similarity", detail::opt(similarity)}};
}

inline nlohmann::json parse_metrics_request(const nlohmann::json& body, const MetricConfig& config = {}) {
    if (!body.is_object()) throw RequestError(400, "request body must be a JSON object");
    for (const char* key : {"a", "b"}) {
        if (!body.contains(key) || !body[key].is_string()) throw RequestError(400, std::string("missing pattern field: ") + key);
    }
    return compare_patterns(body["a"].get<std::string>(), body["b"].get<std::string>(),
                            detail::string_list(body, "positives", false), detail::string_list(body, "negatives", false),
                            detail::mode_field(body), config);
}

namespace detail {

inline void reply(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

inline void reply_error(httplib::Response& res, int status, const std::string& message) {
    reply(res, status, {{"error", message}});
}

inline nlohmann::json body_json(const httplib::Request& req) {
    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded()) throw RequestError(400, "request body is not valid JSON");
    return body;
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
    try {
        fn();
    } catch (const RequestError& e) {
        reply_error(res, e.status(), e.what());
    } catch (const std::exception& e) {
        reply_error(res, 500, e.what());
    }
}

}  // namespace detail

/// Installs the JSON API on a server. The store must outlive the server.
inline void register_routes(httplib::Server& server, const CorpusStore& store, const GatewayConfig& config = {}) {
    server.Get("/api/health", [&store](const httplib::Request&, httplib::Response& res) {
        detail::reply(res, 200, health_json(store));
    });

    server.Get(R"(/api/regex/([^/]+))", [&store](const httplib::Request& req, httplib::Response& res) {
        detail::guarded(res, [&] {
            const auto id = parse_id(req.matches[1].str());
            if (!id) throw RequestError(400, "id must be a hexadecimal string");
            const StoredEntry* e = store.find(*id);
            if (!e) throw RequestError(404, "no entry with id " + req.matches[1].str());
            detail::reply(res, 200, entry_json(*e));
        });
    });

    server.Post("/api/metrics", [config](const httplib::Request& req, httplib::Response& res) {
        detail::guarded(res, [&] { detail::reply(res, 200, parse_metrics_request(detail::body_json(req), config.metrics)); });
    });

    server.Post("/api/query", [&store, config](const httplib::Request& req, httplib::Response& res) {
        detail::guarded(res, [&] {
            const ApiQueryRequest q = parse_query_request(detail::body_json(req), config);
            if (!q.stream) {
                const QueryResult r = execute_query(store, q, config);
                detail::reply(res, r.stats.truncated ? 504 : 200, query_result_json(r));
                return;
            }
            // Newline-delimited JSON: one "match" line per satisfying entry as
            // the scan finds it, then a "result" line with the ranked list and
            // the stats.
            res.set_chunked_content_provider("application/x-ndjson", [&store, config, q](std::size_t, httplib::DataSink& sink) {
                std::atomic<bool> cancel{false};
                const QueryResult r = execute_query(store, q, config, &cancel, [&](const StoredEntry& e) {
                    const std::string line =
                        nlohmann::json{{"type", "match"}, {"id", format_id(e.entry.id)}, {"pattern", e.entry.pattern}}.dump() + "\n";
                    if (!sink.write(line.data(), line.size())) cancel = true;
                });
                if (cancel) return false;
                nlohmann::json last = query_result_json(r);
                last["type"] = "result";
                const std::string line = last.dump() + "\n";
                sink.write(line.data(), line.size());
                sink.done();
                return true;
            });
        });
    });
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_GATEWAY_HPP
