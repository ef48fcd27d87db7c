#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <csignal>

#include "CLI11.hpp"
#include "regex_forge/bench.hpp"
#include "regex_forge/corpus.hpp"
#include "regex_forge/gateway.hpp"
#include "regex_forge/sampling.hpp"

namespace fs = std::filesystem;
using namespace regex_forge;

namespace {

// Errors caused by the invocation rather than by the tool.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    return in;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path.string());
    return out;
}

CorpusStore open_store(const std::string& db) {
    if (db.empty()) throw UsageError("no store given (--db or REGEX_FORGE_DB)");
    if (!fs::exists(fs::path(db) / "manifest.json")) throw UsageError("no corpus store at " + db);
    return CorpusStore::open(db);
}

std::string fixed(double v, int digits = 3) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

std::string fixed(const std::optional<double>& v) { return v ? fixed(*v) : "-"; }

std::vector<std::string> split_command(const std::string& cmd) {
    std::istringstream in(cmd);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

struct IngestArgs {
    std::string db;
    std::vector<std::string> inputs;
    std::string source;
    std::size_t shards = 16;
};

int run_ingest(const IngestArgs& a) {
    if (a.db.empty()) throw UsageError("no store given (--db or REGEX_FORGE_DB)");
    std::optional<CorpusSource> source;
    if (!a.source.empty()) {
        source = parse_corpus_source(a.source);
        if (!source) throw UsageError("unknown source: " + a.source);
    }
    CorpusStore store = CorpusStore::open_or_create(a.db, a.shards);
    std::size_t records = 0, skipped = 0, added = 0;
    for (const auto& path : a.inputs) {
        IngestReport r;
        if (path == "-") {
            r = store.ingest(std::cin, source);
        } else {
            std::ifstream in = open_input(path);
            r = store.ingest(in, source);
        }
        records += r.records;
        skipped += r.skipped;
        added += r.new_entries;
    }
    std::cout << "records=" << records << " skipped=" << skipped << " new_entries=" << added
              << " entries=" << store.size() << '\n';
    std::cout << corpus_stats_json(store.stats()).dump(2) << '\n';
    return 0;
}

struct QueryArgs {
    std::string db;
    std::vector<std::string> positives, negatives, sources, exclude;
    std::string examples_file;
    std::string mode = "partial";
    std::string rank = "strict-first";
    std::size_t limit = 50;
    bool spread = false;
    bool json = false;
    bool prefilter = false;
    std::size_t workers = 0;
    double timeout_s = 60.0;
};

int run_query_command(const QueryArgs& a) {
    nlohmann::json body = {{"positives", a.positives}, {"negatives", a.negatives}, {"mode", a.mode},
                           {"rank", a.rank},           {"limit", a.limit},         {"spread", a.spread}};
    if (!a.examples_file.empty()) {
        std::ifstream in = open_input(a.examples_file);
        const nlohmann::json f = nlohmann::json::parse(in, nullptr, false);
        if (!f.is_object()) throw UsageError(a.examples_file + " must hold a JSON object with positives and negatives");
        for (const char* key : {"positives", "negatives"}) {
            for (const auto& s : detail::string_list(f, key, false)) body[key].push_back(s);
        }
    }
    if (!a.sources.empty()) body["sources"] = a.sources;
    if (!a.exclude.empty()) body["exclude"] = a.exclude;

    GatewayConfig config;
    config.engine.prefilter = a.prefilter;
    config.engine.workers = a.workers;
    config.engine.wall_cap = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::duration<double>(a.timeout_s));
    const ApiQueryRequest req = parse_query_request(body, config);
    const CorpusStore store = open_store(a.db);
    const QueryResult r = execute_query(store, req, config);

    if (a.json) {
        std::cout << query_result_json(r).dump(2) << '\n';
    } else {
        std::cout << "rank  accuracy  strictness  length  features  source       pattern\n";
        for (const auto& c : r.candidates) {
            std::cout << std::left << std::setw(6) << c.rank_position << std::setw(10) << fixed(c.bundle.accuracy)
                      << std::setw(12) << fixed(c.bundle.strictness) << std::setw(8) << c.bundle.pattern_length
                      << std::setw(10) << c.bundle.feature_count << std::setw(13)
                      << corpus_source_name(c.entry->entry.source()) << c.entry->entry.pattern << '\n';
        }
        const QueryStats& s = r.stats;
        std::cout << "scanned=" << s.scanned << " pruned=" << s.pruned << " matched=" << s.matched
                  << " timeouts=" << s.timeouts << " elapsed_ms=" << fixed(std::chrono::duration<double, std::milli>(s.elapsed).count(), 1)
                  << (s.truncated ? " truncated" : "") << '\n';
    }
    return 0;
}

struct MetricsArgs {
    std::string a, b;
    std::vector<std::string> positives, negatives;
    std::string mode = "partial";
    bool json = false;
};

int run_metrics(const MetricsArgs& m) {
    const nlohmann::json body = {{"a", m.a}, {"b", m.b}, {"positives", m.positives}, {"negatives", m.negatives}, {"mode", m.mode}};
    const nlohmann::json out = parse_metrics_request(body);
    if (m.json) {
        std::cout << out.dump(2) << '\n';
        return 0;
    }
    auto value = [](const nlohmann::json& v) {
        if (v.is_null()) return std::string("null");
        if (v.is_string()) return v.get<std::string>();
        return v.dump();
    };
    std::cout << "ted=" << out["ted"].dump() << '\n';
    std::cout << "semantic_similarity=" << value(out["semantic_similarity"]) << '\n';
    for (const char* side : {"a", "b"}) {
        const auto& s = out[side];
        std::cout << side << ".pattern=" << s["pattern"].get<std::string>() << '\n';
        for (const char* key : {"regularity", "pattern_length", "feature_count", "nfa_size", "accuracy", "strictness"}) {
            std::cout << side << '.' << key << '=' << value(s[key]) << '\n';
        }
    }
    return 0;
}

struct SampleArgs {
    std::string tasks;
    double confidence = 0.95, margin = 0.05, proportion = 0.5;
    std::uint64_t seed = 0;
    std::size_t ablation = 0;
    std::string out_dir = "sample";
};

int run_sample(const SampleArgs& a) {
    std::ifstream in = open_input(a.tasks);
    const TaskLoad load = load_tasks(in);
    if (load.tasks.empty()) throw UsageError("no usable tasks in " + a.tasks);
    const std::size_t n = cochran_sample_size(load.tasks.size(), z_for_confidence(a.confidence), a.proportion, a.margin);
    if (n + a.ablation > load.tasks.size()) throw UsageError("evaluation plus ablation exceeds the task population");
    const Stratification s = stratify(load.tasks);
    const Allocation alloc = stratify_and_allocate(s, n, a.ablation);
    const SampleSets sets = draw_samples(s, alloc, a.seed);

    auto write_set = [&](const std::vector<std::size_t>& idx, const char* name) {
        std::vector<CompositionTask> picked;
        for (std::size_t i : idx) picked.push_back(load.tasks[i]);
        std::ofstream out = open_output(fs::path(a.out_dir) / name);
        write_tasks(out, picked);
    };
    write_set(sets.evaluation, "evaluation.jsonl");
    write_set(sets.ablation, "ablation.jsonl");

    nlohmann::json strata = nlohmann::json::array();
    for (std::size_t h = 0; h < kStratumCount; ++h) {
        if (s.members[h].empty()) continue;
        const StratumKey k = StratumKey::from_index(h);
        strata.push_back({{"source", task_source_name(k.source)},
                          {"test_count_quartile", k.test_count_quartile + 1},
                          {"positive_ratio_quartile", k.positive_ratio_quartile + 1},
                          {"size", s.members[h].size()},
                          {"sigma", s.sigma[h]},
                          {"evaluation", alloc.evaluation[h]},
                          {"ablation", alloc.ablation[h]}});
    }
    nlohmann::json excluded = nlohmann::json::array();
    for (const auto& e : load.excluded) excluded.push_back({{"id", e.id}, {"reason", e.reason}});
    const nlohmann::json summary = {{"population", load.tasks.size()},
                                    {"malformed", load.malformed},
                                    {"excluded", excluded},
                                    {"confidence", a.confidence},
                                    {"margin", a.margin},
                                    {"proportion", a.proportion},
                                    {"seed", a.seed},
                                    {"evaluation_size", sets.evaluation.size()},
                                    {"ablation_size", sets.ablation.size()},
                                    {"test_count_bounds", s.test_count_bounds},
                                    {"positive_ratio_bounds", s.positive_ratio_bounds},
                                    {"strata", strata}};
    std::ofstream out = open_output(fs::path(a.out_dir) / "sample.json");
    out << summary.dump(2) << '\n';
    std::cout << "population=" << load.tasks.size() << " evaluation=" << sets.evaluation.size()
              << " ablation=" << sets.ablation.size() << " out=" << a.out_dir << '\n';
    return 0;
}

struct RunArgs {
    std::string tasks, db, strategy = "reuse-all", adapter, adapter_id = "adapter", out = "records.jsonl", mode = "partial";
    double adapter_timeout_s = 60.0;
    std::size_t workers = 1;
};

int run_bench(const RunArgs& a) {
    std::ifstream in = open_input(a.tasks);
    const TaskLoad load = load_tasks(in);
    const auto match = parse_match_mode(a.mode);
    if (!match) throw UsageError("mode must be partial or full");
    BenchConfig config;
    config.metrics.mode = *match;
    config.workers = a.workers;

    std::optional<CorpusStore> store;
    std::unique_ptr<Strategy> strategy;
    if (!a.adapter.empty()) {
        const auto argv = split_command(a.adapter);
        if (argv.empty()) throw UsageError("empty adapter command");
        strategy = std::make_unique<AdapterStrategy>(
            a.adapter_id, argv, std::chrono::milliseconds(static_cast<long long>(a.adapter_timeout_s * 1000)));
    } else {
        const std::string prefix = "reuse-";
        const auto mode = a.strategy.rfind(prefix, 0) == 0 ? parse_reuse_mode(a.strategy.substr(prefix.size())) : std::nullopt;
        if (!mode) throw UsageError("unknown strategy: " + a.strategy);
        store.emplace(open_store(a.db));
        EngineConfig engine;
        engine.workers = 1;
        strategy = std::make_unique<ReuseStrategy>(*store, *mode, *match, engine);
    }
    const std::vector<TaskRecord> records = run_strategy(*strategy, load.tasks, config);
    std::ofstream out = open_output(a.out);
    std::size_t successes = 0, errors = 0;
    for (const auto& r : records) {
        out << record_json(r).dump() << '\n';
        successes += r.success ? 1 : 0;
        errors += r.status == TaskStatus::StrategyError ? 1 : 0;
    }
    std::cout << "strategy=" << strategy->id() << " tasks=" << records.size() << " successes=" << successes
              << " strategy_errors=" << errors << " excluded=" << load.excluded.size() << " malformed=" << load.malformed
              << " out=" << a.out << '\n';
    return 0;
}

struct ReportArgs {
    std::vector<std::string> records;
    std::string json, csv;
};

int run_report(const ReportArgs& a) {
    std::vector<TaskRecord> records;
    for (const auto& path : a.records) {
        std::ifstream in = open_input(path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded()) throw UsageError(path + ":" + std::to_string(line_no) + ": not JSON");
            try {
                records.push_back(record_from_json(j));
            } catch (const nlohmann::json::exception& e) {
                throw UsageError(path + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }
    }
    const BenchReport report = aggregate(std::move(records));
    const nlohmann::json j = report_json(report);
    if (!a.json.empty()) {
        std::ofstream out = open_output(a.json);
        out << j.dump(2) << '\n';
    }
    if (!a.csv.empty()) {
        std::ofstream out = open_output(a.csv);
        write_report_csv(out, report);
    }
    if (a.json.empty() && a.csv.empty()) std::cout << j.dump(2) << '\n';
    else {
        for (const auto& s : report.strategies) {
            std::cout << "strategy=" << s.strategy << " tasks=" << s.tasks << " success_rate=" << fixed(s.success_rate) << '\n';
        }
    }
    return 0;
}

struct ServeArgs {
    std::string db, host = "127.0.0.1";
    int port = 8080;
    std::size_t workers = 0;
};

httplib::Server* g_server = nullptr;

int run_serve(const ServeArgs& a) {
    const CorpusStore store = open_store(a.db);
    GatewayConfig config;
    config.engine.workers = a.workers;
    httplib::Server server;
    register_routes(server, store, config);
    g_server = &server;
    std::signal(SIGINT, [](int) {
        if (g_server) g_server->stop();
    });
    std::signal(SIGTERM, [](int) {
        if (g_server) g_server->stop();
    });
    if (!server.bind_to_port(a.host, a.port)) throw UsageError("cannot bind " + a.host + ":" + std::to_string(a.port));
    std::cerr << "serving " << store.size() << " entries on http://" << a.host << ':' << a.port << '\n';
    server.listen_after_bind();
    g_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regex-forge: reuse-by-example over a regex corpus, metrics and benchmarks"};
    app.require_subcommand(1);
    const char* env_db = std::getenv("REGEX_FORGE_DB");
    const std::string default_db = env_db ? env_db : "";

    IngestArgs ingest;
    ingest.db = default_db;
    auto* ingest_cmd = app.add_subcommand("ingest", "Build or extend a corpus store from JSONL");
    ingest_cmd->add_option("--db", ingest.db, "Store directory");
    ingest_cmd->add_option("--input,-i", ingest.inputs, "JSONL files ('-' for stdin)")->required();
    ingest_cmd->add_option("--source", ingest.source, "Source for records without one");
    ingest_cmd->add_option("--shards", ingest.shards, "Shard count for a new store")->check(CLI::Range(1, 256));

    QueryArgs query;
    query.db = default_db;
    auto* query_cmd = app.add_subcommand("query", "Find corpus regexes consistent with examples");
    query_cmd->add_option("--db", query.db, "Store directory");
    query_cmd->add_option("-p,--positive", query.positives, "Positive example");
    query_cmd->add_option("-n,--negative", query.negatives, "Negative example");
    query_cmd->add_option("--examples-file", query.examples_file, "JSON object with positives and negatives");
    query_cmd->add_option("--mode", query.mode, "partial or full")->check(CLI::IsMember({"partial", "full"}));
    query_cmd->add_option("--rank", query.rank)->check(CLI::IsMember({"strict-first", "loose-first", "none"}));
    query_cmd->add_option("--limit", query.limit)->check(CLI::PositiveNumber);
    query_cmd->add_flag("--spread", query.spread, "Sample the limit across strictness deciles");
    query_cmd->add_option("--source", query.sources, "Restrict to a source (repeatable)");
    query_cmd->add_option("--exclude", query.exclude, "Pattern to leave out (repeatable)");
    query_cmd->add_flag("--prefilter", query.prefilter, "Skip entries whose required literals are absent");
    query_cmd->add_option("--workers", query.workers, "Scan threads (0: hardware)");
    query_cmd->add_option("--timeout", query.timeout_s, "Wall-time cap in seconds")->check(CLI::PositiveNumber);
    query_cmd->add_flag("--json", query.json);

    MetricsArgs metrics;
    auto* metrics_cmd = app.add_subcommand("metrics", "Compare two patterns");
    metrics_cmd->add_option("--a", metrics.a)->required();
    metrics_cmd->add_option("--b", metrics.b)->required();
    metrics_cmd->add_option("-p,--positive", metrics.positives);
    metrics_cmd->add_option("-n,--negative", metrics.negatives);
    metrics_cmd->add_option("--mode", metrics.mode)->check(CLI::IsMember({"partial", "full"}));
    metrics_cmd->add_flag("--json", metrics.json);

    auto* bench_cmd = app.add_subcommand("bench", "Benchmark harness");
    bench_cmd->require_subcommand(1);
    SampleArgs sample;
    auto* sample_cmd = bench_cmd->add_subcommand("sample", "Stratified evaluation and ablation samples");
    sample_cmd->add_option("--tasks", sample.tasks)->required();
    sample_cmd->add_option("--confidence", sample.confidence);
    sample_cmd->add_option("--margin", sample.margin);
    sample_cmd->add_option("--proportion", sample.proportion);
    sample_cmd->add_option("--seed", sample.seed);
    sample_cmd->add_option("--ablation", sample.ablation, "Ablation sample size");
    sample_cmd->add_option("--out-dir", sample.out_dir);

    RunArgs run;
    run.db = default_db;
    auto* run_cmd = bench_cmd->add_subcommand("run", "Run one strategy over a task file");
    run_cmd->add_option("--tasks", run.tasks)->required();
    run_cmd->add_option("--db", run.db);
    run_cmd->add_option("--strategy", run.strategy, "reuse-all, reuse-oss or reuse-internet");
    run_cmd->add_option("--adapter", run.adapter, "External composer command");
    run_cmd->add_option("--adapter-id", run.adapter_id);
    run_cmd->add_option("--adapter-timeout", run.adapter_timeout_s, "Seconds per task")->check(CLI::PositiveNumber);
    run_cmd->add_option("--mode", run.mode)->check(CLI::IsMember({"partial", "full"}));
    run_cmd->add_option("--workers", run.workers)->check(CLI::PositiveNumber);
    run_cmd->add_option("--out", run.out);

    ReportArgs report;
    auto* report_cmd = bench_cmd->add_subcommand("report", "Aggregate task records");
    report_cmd->add_option("--records", report.records)->required();
    report_cmd->add_option("--json", report.json);
    report_cmd->add_option("--csv", report.csv);

    ServeArgs serve;
    serve.db = default_db;
    auto* serve_cmd = app.add_subcommand("serve", "HTTP/JSON service");
    serve_cmd->add_option("--db", serve.db);
    serve_cmd->add_option("--host", serve.host);
    serve_cmd->add_option("--port", serve.port)->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--workers", serve.workers, "Scan threads per query (0: hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*ingest_cmd) return run_ingest(ingest);
        if (*query_cmd) return run_query_command(query);
        if (*metrics_cmd) return run_metrics(metrics);
        if (*sample_cmd) return run_sample(sample);
        if (*run_cmd) return run_bench(run);
        if (*report_cmd) return run_report(report);
        if (*serve_cmd) return run_serve(serve);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const RequestError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const QueryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const SamplingError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const BenchError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const StoreError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
