#ifndef REGEX_FORGE_BENCH_HPP
#define REGEX_FORGE_BENCH_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "regex_forge/metrics.hpp"
#include "regex_forge/reuse.hpp"
#include "regex_forge/sampling.hpp"
#include "regex_forge/stats.hpp"
#include "regex_forge/subprocess.hpp"
#include "regex_forge/task.hpp"

namespace regex_forge {

class BenchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TaskExclusion {
    std::string id;
    std::string reason;  // no-positive, no-negative, parse-error, unsupported
};

struct TaskLoad {
    std::vector<CompositionTask> tasks;
    std::vector<TaskExclusion> excluded;
    std::size_t malformed = 0;
};

/// Reads task JSONL. Tasks without positives or negatives, or whose ground
/// truth does not parse, are excluded with a reason; lines that do not match
/// the schema are counted as malformed. Duplicate ids throw BenchError.
inline TaskLoad load_tasks(std::istream& in) {
    TaskLoad out;
    std::unordered_set<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        auto strings = [&](const char* key, std::vector<std::string>& dst) {
            auto it = j.find(key);
            if (it == j.end() || !it->is_array()) return false;
            for (const auto& s : *it) {
                if (!s.is_string()) return false;
                dst.push_back(s.get<std::string>());
            }
            return true;
        };
        CompositionTask t;
        std::optional<TaskSource> source;
        if (j.is_object() && j.contains("id") && j["id"].is_string() && j.contains("ground_truth") &&
            j["ground_truth"].is_string() && j.contains("source") && j["source"].is_string()) {
            t.id = j["id"].get<std::string>();
            t.ground_truth = j["ground_truth"].get<std::string>();
            source = parse_task_source(j["source"].get<std::string>());
        }
        if (!source || !strings("positives", t.positives) || !strings("negatives", t.negatives)) {
            ++out.malformed;
            continue;
        }
        t.source = *source;
        if (!ids.insert(t.id).second) throw BenchError("duplicate task id: " + t.id);
        if (t.positives.empty()) {
            out.excluded.push_back({t.id, "no-positive"});
            continue;
        }
        if (t.negatives.empty()) {
            out.excluded.push_back({t.id, "no-negative"});
            continue;
        }
        try {
            parse(t.ground_truth);
        } catch (const ParseError& e) {
            out.excluded.push_back({t.id, e.unsupported() ? "unsupported" : "parse-error"});
            continue;
        }
        out.tasks.push_back(std::move(t));
    }
    return out;
}

inline nlohmann::json task_json(const CompositionTask& t) {
    return {{"id", t.id},
            {"ground_truth", t.ground_truth},
            {"positives", t.positives},
            {"negatives", t.negatives},
            {"source", task_source_name(t.source)}};
}

inline void write_tasks(std::ostream& out, const std::vector<CompositionTask>& tasks) {
    for (const auto& t : tasks) out << task_json(t).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Strategies

struct ComposeOutput {
    std::vector<std::string> candidates;
    std::chrono::nanoseconds compose_time{0};
    std::optional<std::chrono::nanoseconds> first_success;
    bool error = false;
    std::string error_message;
    std::size_t timeouts = 0;
};

class Strategy {
public:
    virtual ~Strategy() = default;
    virtual std::string id() const = 0;
    virtual ComposeOutput compose(const CompositionTask& task) const = 0;
};

enum class ReuseMode : std::uint8_t { All, Oss, Internet };

constexpr std::string_view reuse_mode_name(ReuseMode m) {
    switch (m) {
        case ReuseMode::All: return "all";
        case ReuseMode::Oss: return "oss";
        case ReuseMode::Internet: return "internet";
    }
    return "?";
}

inline std::optional<ReuseMode> parse_reuse_mode(std::string_view s) {
    if (s == "all") return ReuseMode::All;
    if (s == "oss") return ReuseMode::Oss;
    if (s == "internet") return ReuseMode::Internet;
    return std::nullopt;
}

constexpr SourceMask reuse_mode_sources(ReuseMode m) {
    switch (m) {
        case ReuseMode::All: return kAllSources;
        case ReuseMode::Oss: return source_bit(CorpusSource::OssProject);
        case ReuseMode::Internet:
            return source_bit(CorpusSource::RegexLib) | source_bit(CorpusSource::SoPost) |
                   source_bit(CorpusSource::SoComment);
    }
    return kAllSources;
}

/// Reuse-by-example over a corpus, with each task's ground truth removed
/// from the corpus before its query.
class ReuseStrategy : public Strategy {
public:
    ReuseStrategy(const CorpusStore& store, ReuseMode mode = ReuseMode::All, MatchMode match = MatchMode::Partial,
                  EngineConfig config = {})
        : store_(store), mode_(mode), match_(match), config_(std::move(config)) {}

    std::string id() const override { return "reuse-" + std::string(reuse_mode_name(mode_)); }

    ComposeOutput compose(const CompositionTask& task) const override {
        Query q;
        q.positives = task.positives;
        q.negatives = task.negatives;
        q.mode = match_;
        q.sources = reuse_mode_sources(mode_);
        q.exclusions = {task.ground_truth};
        ComposeOutput out;
        const auto started = std::chrono::steady_clock::now();
        std::optional<std::chrono::steady_clock::time_point> first;
        try {
            const QueryResult r = run_query(store_.view(), q, config_, nullptr, [&](const StoredEntry&) {
                if (!first) first = std::chrono::steady_clock::now();
            });
            for (const auto& c : r.candidates) out.candidates.push_back(c.entry->entry.pattern);
            out.compose_time = r.stats.elapsed;
            out.timeouts = r.stats.timeouts;
            if (first) out.first_success = *first - started;
        } catch (const QueryError& e) {
            out.error = true;
            out.error_message = e.what();
        }
        return out;
    }

private:
    const CorpusStore& store_;
    ReuseMode mode_;
    MatchMode match_;
    EngineConfig config_;
};

/// External composer: one process per task, request on stdin, candidates
/// on stdout. Nonzero exit, timeout or an invalid response is a
/// strategy error.
class AdapterStrategy : public Strategy {
public:
    AdapterStrategy(std::string id, std::vector<std::string> command, std::chrono::milliseconds timeout)
        : id_(std::move(id)), command_(std::move(command)), timeout_(timeout) {}

    std::string id() const override { return id_; }

    ComposeOutput compose(const CompositionTask& task) const override {
        const nlohmann::json request = {
            {"positives", task.positives}, {"negatives", task.negatives}, {"timeout_ms", timeout_.count()}};
        ComposeOutput out;
        const auto started = std::chrono::steady_clock::now();
        const ProcessResult p = run_process(command_, request.dump() + "\n", timeout_);
        out.compose_time = std::chrono::steady_clock::now() - started;
        auto fail = [&](std::string why) {
            out.error = true;
            out.error_message = std::move(why);
            out.candidates.clear();
            return out;
        };
        if (!p.started) return fail(p.error);
        if (p.timed_out) return fail("adapter timed out");
        if (p.exit_code != 0) return fail("adapter exited with status " + std::to_string(p.exit_code));
        const nlohmann::json response = nlohmann::json::parse(p.out, nullptr, false);
        if (response.is_discarded() || !response.is_object()) return fail("adapter response is not a JSON object");
        auto it = response.find("candidates");
        if (it == response.end() || !it->is_array()) return fail("adapter response lacks a candidates array");
        for (const auto& c : *it) {
            if (!c.is_string()) return fail("adapter candidate is not a string");
            out.candidates.push_back(c.get<std::string>());
        }
        if (auto f = response.find("first_success_ms"); f != response.end() && f->is_number()) {
            out.first_success = std::chrono::duration_cast<std::chrono::nanoseconds>(
                std::chrono::duration<double, std::milli>(f->get<double>()));
        }
        return out;
    }

private:
    std::string id_;
    std::vector<std::string> command_;
    std::chrono::milliseconds timeout_;
};

// ---------------------------------------------------------------------------
// Records

inline const std::vector<std::string>& candidate_metric_names() {
    static const std::vector<std::string> names = {"accuracy",      "semantic_similarity", "strictness", "pattern_length",
                                                   "feature_count", "ted",                 "nfa_size"};
    return names;
}

inline std::optional<double> metric_value(const MetricBundle& b, std::string_view name) {
    if (name == "accuracy") return b.accuracy;
    if (name == "semantic_similarity") return b.semantic_similarity;
    if (name == "strictness") return b.strictness;
    if (name == "pattern_length") return static_cast<double>(b.pattern_length);
    if (name == "feature_count") return static_cast<double>(b.feature_count);
    if (name == "ted" && b.ted_to_ground) return static_cast<double>(*b.ted_to_ground);
    if (name == "nfa_size" && b.nfa_size) return static_cast<double>(*b.nfa_size);
    return std::nullopt;
}

struct MetricSummary {
    std::optional<double> mean;
    std::optional<double> variance;  // absent below two values
};

enum class TaskStatus : std::uint8_t { Ok, StrategyError };

struct TaskRecord {
    std::string task_id;
    std::string strategy;
    std::string ground_truth;
    std::size_t test_count = 0;
    TaskStatus status = TaskStatus::Ok;
    std::string error;
    std::vector<std::string> candidate_patterns;  // parallel to candidates
    std::vector<MetricBundle> candidates;
    std::size_t invalid_candidates = 0;  // candidates that did not parse
    MetricBundle ground;                 // the ground truth measured like a candidate
    bool success = false;
    std::chrono::nanoseconds compose_time{0};
    std::optional<std::chrono::nanoseconds> first_success;
    std::size_t timeouts = 0;
    std::map<std::string, MetricSummary> per_metric;
};

inline void summarize(TaskRecord& r) {
    r.per_metric.clear();
    for (const std::string& name : candidate_metric_names()) {
        std::vector<double> v;
        for (const auto& b : r.candidates) {
            if (auto x = metric_value(b, name)) v.push_back(*x);
        }
        r.per_metric[name] = {mean(v), population_variance(v)};
    }
}

struct BenchConfig {
    MetricConfig metrics;
    std::size_t workers = 1;
};

inline TaskRecord run_task(const Strategy& strategy, const CompositionTask& task, const BenchConfig& config) {
    TaskRecord r;
    r.task_id = task.id;
    r.strategy = strategy.id();
    r.ground_truth = task.ground_truth;
    r.test_count = task.test_count();
    const PreparedPattern ground = prepare_pattern(task.ground_truth, config.metrics);
    r.ground = measure_candidate(ground, task, &ground, {}, config.metrics);

    ComposeOutput out;
    try {
        out = strategy.compose(task);
    } catch (const std::exception& e) {
        out.error = true;
        out.error_message = e.what();
    }
    r.compose_time = out.compose_time;
    r.first_success = out.first_success;
    r.timeouts = out.timeouts;
    if (out.error) {
        r.status = TaskStatus::StrategyError;
        r.error = out.error_message;
    }
    for (const std::string& pattern : out.candidates) {
        try {
            const PreparedPattern c = prepare_pattern(pattern, config.metrics);
            r.candidates.push_back(measure_candidate(c, task, &ground, out.compose_time, config.metrics));
            r.candidate_patterns.push_back(pattern);
        } catch (const ParseError&) {
            ++r.invalid_candidates;
        }
    }
    r.success = std::any_of(r.candidates.begin(), r.candidates.end(), [](const MetricBundle& b) { return b.accuracy == 1.0; });
    summarize(r);
    return r;
}

/// Runs the strategy on every task; records come back in task order.
inline std::vector<TaskRecord> run_strategy(const Strategy& strategy, const std::vector<CompositionTask>& tasks,
                                            const BenchConfig& config = {}) {
    std::vector<TaskRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) records[i] = run_task(strategy, tasks[i], config);
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(config.workers, tasks.size()));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return records;
}

inline nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

inline double seconds(std::chrono::nanoseconds d) { return std::chrono::duration<double>(d).count(); }

inline nlohmann::json bundle_json(const MetricBundle& b) {
    auto opt_size = [](const std::optional<std::size_t>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"pattern_length", b.pattern_length},
            {"feature_count", b.feature_count},
            {"nfa_size", opt_size(b.nfa_size)},
            {"ted_to_ground", opt_size(b.ted_to_ground)},
            {"semantic_similarity", optional_json(b.semantic_similarity)},
            {"accuracy", b.accuracy},
            {"strictness", optional_json(b.strictness)},
            {"generation_time_s", seconds(b.generation_time)},
            {"timeouts", b.timeouts}};
}

inline nlohmann::json record_json(const TaskRecord& r) {
    nlohmann::json candidates = nlohmann::json::array();
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
        nlohmann::json c = bundle_json(r.candidates[i]);
        c["pattern"] = r.candidate_patterns[i];
        candidates.push_back(std::move(c));
    }
    nlohmann::json per_metric = nlohmann::json::object();
    for (const auto& [name, s] : r.per_metric) per_metric[name] = {{"mean", optional_json(s.mean)}, {"variance", optional_json(s.variance)}};
    return {{"task_id", r.task_id},
            {"strategy", r.strategy},
            {"ground_truth", r.ground_truth},
            {"test_count", r.test_count},
            {"status", r.status == TaskStatus::Ok ? "ok" : "strategy-error"},
            {"error", r.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.error)},
            {"success", r.success},
            {"compose_time_s", seconds(r.compose_time)},
            {"first_success_s", r.first_success ? nlohmann::json(seconds(*r.first_success)) : nlohmann::json(nullptr)},
            {"timeouts", r.timeouts},
            {"invalid_candidates", r.invalid_candidates},
            {"ground", bundle_json(r.ground)},
            {"candidates", candidates},
            {"per_metric", per_metric}};
}

inline std::optional<double> json_opt(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<double>();
}

inline MetricBundle bundle_from_json(const nlohmann::json& j) {
    MetricBundle b;
    auto size_opt = [&](const char* key) -> std::optional<std::size_t> {
        const auto v = json_opt(j, key);
        return v ? std::optional<std::size_t>(static_cast<std::size_t>(*v)) : std::nullopt;
    };
    b.pattern_length = j.at("pattern_length").get<std::size_t>();
    b.feature_count = j.at("feature_count").get<std::size_t>();
    b.nfa_size = size_opt("nfa_size");
    b.ted_to_ground = size_opt("ted_to_ground");
    b.semantic_similarity = json_opt(j, "semantic_similarity");
    b.accuracy = j.at("accuracy").get<double>();
    b.strictness = json_opt(j, "strictness");
    b.generation_time = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::duration<double>(j.value("generation_time_s", 0.0)));
    b.timeouts = j.value("timeouts", std::size_t{0});
    return b;
}

/// Inverse of record_json; per-metric summaries are recomputed.
inline TaskRecord record_from_json(const nlohmann::json& j) {
    TaskRecord r;
    r.task_id = j.at("task_id").get<std::string>();
    r.strategy = j.at("strategy").get<std::string>();
    r.ground_truth = j.value("ground_truth", "");
    r.test_count = j.at("test_count").get<std::size_t>();
    r.status = j.at("status") == "ok" ? TaskStatus::Ok : TaskStatus::StrategyError;
    if (j.contains("error") && j["error"].is_string()) r.error = j["error"].get<std::string>();
    r.success = j.at("success").get<bool>();
    r.compose_time = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::duration<double>(j.at("compose_time_s").get<double>()));
    if (auto f = json_opt(j, "first_success_s")) {
        r.first_success = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::duration<double>(*f));
    }
    r.timeouts = j.value("timeouts", std::size_t{0});
    r.invalid_candidates = j.value("invalid_candidates", std::size_t{0});
    r.ground = bundle_from_json(j.at("ground"));
    for (const auto& c : j.at("candidates")) {
        r.candidates.push_back(bundle_from_json(c));
        r.candidate_patterns.push_back(c.at("pattern").get<std::string>());
    }
    summarize(r);
    return r;
}

// ---------------------------------------------------------------------------
// Aggregation

struct Distribution {
    std::size_t count = 0;
    std::optional<double> p10, median, p90, mean;
};

inline Distribution distribution(const std::vector<double>& v) {
    return {v.size(), percentile(v, 10), percentile(v, 50), percentile(v, 90), regex_forge::mean(v)};
}

struct SuccessBySize {
    std::size_t test_count = 0;
    std::size_t tasks = 0;
    double success_rate = 0.0;
};

struct StrategyReport {
    std::string strategy;
    std::size_t tasks = 0;
    std::size_t successes = 0;
    std::size_t strategy_errors = 0;
    double success_rate = 0.0;
    std::map<std::string, Distribution> per_task_mean;        // distribution over tasks of the per-task mean
    std::map<std::string, Distribution> diff_vs_ground;       // per-task mean minus the ground truth's value
    std::map<std::string, Distribution> per_task_variance;    // tasks with at least two candidates
    std::vector<SuccessBySize> success_by_test_count;
};

struct BenchReport {
    std::vector<StrategyReport> strategies;
};

inline const std::vector<std::string>& non_functional_metrics() {
    static const std::vector<std::string> names = {"pattern_length", "feature_count", "nfa_size"};
    return names;
}

/// Statistics per strategy. Records are put in a canonical order first, so
/// the report does not depend on the order they arrive in.
inline BenchReport aggregate(std::vector<TaskRecord> records) {
    std::sort(records.begin(), records.end(), [](const TaskRecord& a, const TaskRecord& b) {
        return std::tie(a.strategy, a.task_id) < std::tie(b.strategy, b.task_id);
    });
    BenchReport report;
    for (std::size_t lo = 0; lo < records.size();) {
        std::size_t hi = lo;
        while (hi < records.size() && records[hi].strategy == records[lo].strategy) ++hi;
        StrategyReport s;
        s.strategy = records[lo].strategy;
        std::map<std::string, std::vector<double>> means, diffs, variances;
        std::map<std::size_t, std::pair<std::size_t, std::size_t>> by_size;  // test count -> (tasks, successes)
        for (std::size_t i = lo; i < hi; ++i) {
            const TaskRecord& r = records[i];
            ++s.tasks;
            s.successes += r.success ? 1 : 0;
            s.strategy_errors += r.status == TaskStatus::StrategyError ? 1 : 0;
            auto& bucket = by_size[r.test_count];
            ++bucket.first;
            bucket.second += r.success ? 1 : 0;
            means["candidate_count"].push_back(static_cast<double>(r.candidates.size()));
            means["compose_time"].push_back(seconds(r.compose_time));
            for (const auto& [name, m] : r.per_metric) {
                if (m.mean) means[name].push_back(*m.mean);
                if (m.variance) variances[name].push_back(*m.variance);
            }
            for (const std::string& name : non_functional_metrics()) {
                const auto m = r.per_metric.count(name) ? r.per_metric.at(name).mean : std::nullopt;
                const auto g = metric_value(r.ground, name);
                if (m && g) diffs[name].push_back(*m - *g);
            }
        }
        s.success_rate = s.tasks ? static_cast<double>(s.successes) / static_cast<double>(s.tasks) : 0.0;
        for (auto& [name, v] : means) s.per_task_mean[name] = distribution(v);
        for (auto& [name, v] : diffs) s.diff_vs_ground[name] = distribution(v);
        for (auto& [name, v] : variances) s.per_task_variance[name] = distribution(v);
        for (const auto& [size, counts] : by_size) {
            s.success_by_test_count.push_back(
                {size, counts.first, static_cast<double>(counts.second) / static_cast<double>(counts.first)});
        }
        report.strategies.push_back(std::move(s));
        lo = hi;
    }
    return report;
}

inline nlohmann::json distribution_json(const Distribution& d) {
    return {{"count", d.count},
            {"p10", optional_json(d.p10)},
            {"median", optional_json(d.median)},
            {"p90", optional_json(d.p90)},
            {"mean", optional_json(d.mean)}};
}

inline nlohmann::json report_json(const BenchReport& report) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : report.strategies) {
        auto family = [](const std::map<std::string, Distribution>& m) {
            nlohmann::json j = nlohmann::json::object();
            for (const auto& [name, d] : m) j[name] = distribution_json(d);
            return j;
        };
        nlohmann::json by_size = nlohmann::json::array();
        for (const auto& b : s.success_by_test_count) {
            by_size.push_back({{"test_count", b.test_count}, {"tasks", b.tasks}, {"success_rate", b.success_rate}});
        }
        out.push_back({{"strategy", s.strategy},
                       {"tasks", s.tasks},
                       {"successes", s.successes},
                       {"strategy_errors", s.strategy_errors},
                       {"success_rate", s.success_rate},
                       {"per_task_mean", family(s.per_task_mean)},
                       {"diff_vs_ground", family(s.diff_vs_ground)},
                       {"per_task_variance", family(s.per_task_variance)},
                       {"success_by_test_count", by_size}});
    }
    return {{"strategies", out}};
}

/// Long-format table: strategy,metric,statistic,value. Absent values are
/// left empty.
inline void write_report_csv(std::ostream& out, const BenchReport& report) {
    out << "strategy,metric,statistic,value\n";
    auto row = [&](const std::string& strategy, const std::string& metric, const std::string& stat,
                   const std::optional<double>& v) {
        out << strategy << ',' << metric << ',' << stat << ',';
        if (v) {
            std::ostringstream num;
            num.precision(12);
            num << *v;
            out << num.str();
        }
        out << '\n';
    };
    for (const auto& s : report.strategies) {
        row(s.strategy, "success", "rate", s.success_rate);
        row(s.strategy, "success", "tasks", static_cast<double>(s.tasks));
        row(s.strategy, "success", "strategy_errors", static_cast<double>(s.strategy_errors));
        auto family = [&](const std::map<std::string, Distribution>& m, const std::string& suffix) {
            for (const auto& [name, d] : m) {
                const std::string metric = name + suffix;
                row(s.strategy, metric, "count", static_cast<double>(d.count));
                row(s.strategy, metric, "p10", d.p10);
                row(s.strategy, metric, "median", d.median);
                row(s.strategy, metric, "p90", d.p90);
                row(s.strategy, metric, "mean", d.mean);
            }
        };
        family(s.per_task_mean, "");
        family(s.diff_vs_ground, "_diff_vs_ground");
        family(s.per_task_variance, "_variance");
        for (const auto& b : s.success_by_test_count) {
            row(s.strategy, "success_by_test_count", std::to_string(b.test_count), b.success_rate);
        }
    }
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_BENCH_HPP
