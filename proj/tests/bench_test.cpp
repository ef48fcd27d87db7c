#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "regex_forge/bench.hpp"
#include "regex_forge/sampling.hpp"

namespace regex_forge {
namespace {

const std::string kAdapters = std::string(REGEX_FORGE_FIXTURES) + "/adapters/";

CompositionTask task(std::string id, std::string gt, std::vector<std::string> p, std::vector<std::string> n,
                     TaskSource s = TaskSource::Oss) {
    return {std::move(id), std::move(gt), std::move(p), std::move(n), s};
}

TEST(Cochran, Examples) {
    EXPECT_EQ(cochran_sample_size(std::nullopt, 1.96, 0.5, 0.05), 385u);
    EXPECT_EQ(cochran_sample_size(10'000, 1.96, 0.5, 0.05), 371u);
    EXPECT_EQ(cochran_sample_size(50, 1.96, 0.5, 0.05), 45u);
    EXPECT_EQ(cochran_sample_size(1, 1.96, 0.5, 0.05), 1u);
    EXPECT_NEAR(z_for_confidence(0.95), 1.959964, 1e-6);
    EXPECT_THROW(cochran_sample_size(100, 1.96, 0.5, 0.0), SamplingError);
    EXPECT_THROW(cochran_sample_size(100, 1.96, 1.0, 0.05), SamplingError);
    EXPECT_THROW(cochran_sample_size(0, 1.96, 0.5, 0.05), SamplingError);
    EXPECT_THROW(z_for_confidence(1.0), SamplingError);
}

TEST(Cochran, Monotone) {
    std::size_t last = 0;
    for (std::size_t n = 1; n < 200'000; n = n * 3 / 2 + 1) {
        const std::size_t s = cochran_sample_size(n, 1.96, 0.5, 0.05);
        EXPECT_GE(s, last);
        EXPECT_LE(s, 385u);
        last = s;
    }
    std::size_t prev = SIZE_MAX;
    for (double e = 0.01; e < 0.5; e += 0.01) {
        const std::size_t s = cochran_sample_size(10'000, 1.96, 0.5, e);
        EXPECT_LE(s, prev);
        prev = s;
    }
}

TEST(Neyman, HandComputedAllocations) {
    EXPECT_EQ(neyman_allocation({50, 50}, {2.0, 2.0}, 10), (std::vector<std::size_t>{5, 5}));
    EXPECT_EQ(neyman_allocation({90, 10}, {1.0, 1.0}, 10), (std::vector<std::size_t>{9, 1}));
    // Weights 10*1, 10*3: shares 2.5 and 7.5; the tie on remainders goes to the lower index.
    EXPECT_EQ(neyman_allocation({10, 10}, {1.0, 3.0}, 10), (std::vector<std::size_t>{3, 7}));
    // Proportional fallback when every sigma is zero.
    EXPECT_EQ(neyman_allocation({30, 10}, {0.0, 0.0}, 8), (std::vector<std::size_t>{6, 2}));
    // Stratum of 3 would get 5; it is capped and the rest goes elsewhere.
    EXPECT_EQ(neyman_allocation({3, 20}, {10.0, 1.0}, 10), (std::vector<std::size_t>{3, 7}));
    // Zero-sigma strata receive nothing while weighted strata have room.
    EXPECT_EQ(neyman_allocation({10, 10, 10}, {0.0, 1.0, 1.0}, 6), (std::vector<std::size_t>{0, 3, 3}));
    EXPECT_THROW(neyman_allocation({3, 3}, {1.0, 1.0}, 7), SamplingError);
}

TEST(Neyman, SumsExactlyAndRespectsCaps) {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 500; ++k) {
        const std::size_t strata = 1 + rng() % 32;
        std::vector<std::size_t> sizes(strata);
        std::vector<double> sigma(strata);
        std::size_t total = 0;
        for (std::size_t h = 0; h < strata; ++h) {
            sizes[h] = rng() % 40;
            sigma[h] = (rng() % 4 == 0) ? 0.0 : static_cast<double>(rng() % 1000) / 100.0;
            total += sizes[h];
        }
        const std::size_t n = total ? rng() % (total + 1) : 0;
        const auto a = neyman_allocation(sizes, sigma, n);
        std::size_t sum = 0;
        for (std::size_t h = 0; h < strata; ++h) {
            ASSERT_LE(a[h], sizes[h]);
            sum += a[h];
        }
        ASSERT_EQ(sum, n);
    }
}

TEST(Percentiles, QuartilesAreRightClosed) {
    const std::array<double, 3> b = quartile_bounds({1, 2, 3, 4, 5});
    EXPECT_EQ(b[0], 2.0);
    EXPECT_EQ(b[1], 3.0);
    EXPECT_EQ(b[2], 4.0);
    EXPECT_EQ(quartile_of(2.0, b), 0);
    EXPECT_EQ(quartile_of(2.5, b), 1);
    EXPECT_EQ(quartile_of(4.0, b), 2);
    EXPECT_EQ(quartile_of(4.1, b), 3);
}

std::vector<CompositionTask> population(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CompositionTask> tasks;
    for (std::size_t i = 0; i < n; ++i) {
        CompositionTask t = task("t" + std::to_string(i), "a", {}, {}, rng() % 3 ? TaskSource::Oss : TaskSource::RegexLib);
        const std::size_t pos = 1 + rng() % 8, neg = 1 + rng() % 8;
        for (std::size_t k = 0; k < pos; ++k) t.positives.push_back("p" + std::to_string(k));
        for (std::size_t k = 0; k < neg; ++k) t.negatives.push_back("n" + std::to_string(k));
        tasks.push_back(std::move(t));
    }
    return tasks;
}

TEST(Stratify, PartitionsIntoThirtyTwoKeys) {
    const auto tasks = population(2000, 3);
    const Stratification s = stratify(tasks);
    std::size_t covered = 0;
    std::set<std::size_t> seen;
    for (std::size_t h = 0; h < kStratumCount; ++h) {
        covered += s.members[h].size();
        for (std::size_t i : s.members[h]) {
            EXPECT_TRUE(seen.insert(i).second);
            EXPECT_EQ(s.keys[i].index(), h);
        }
        EXPECT_EQ(StratumKey::from_index(h).index(), h);
    }
    EXPECT_EQ(covered, tasks.size());
}

TEST(Draw, DisjointDeterministicAndMatchingAllocation) {
    const auto tasks = population(3000, 9);
    const Stratification s = stratify(tasks);
    const std::size_t n = cochran_sample_size(tasks.size(), 1.96, 0.5, 0.05);
    const Allocation a = stratify_and_allocate(s, n, 68);
    std::size_t eval_total = 0, abl_total = 0;
    for (std::size_t h = 0; h < kStratumCount; ++h) {
        eval_total += a.evaluation[h];
        abl_total += a.ablation[h];
        EXPECT_LE(a.evaluation[h] + a.ablation[h], s.members[h].size());
    }
    EXPECT_EQ(eval_total, n);
    EXPECT_EQ(abl_total, 68u);
    const SampleSets first = draw_samples(s, a, 7);
    const SampleSets second = draw_samples(s, a, 7);
    EXPECT_EQ(first.evaluation, second.evaluation);
    EXPECT_EQ(first.ablation, second.ablation);
    EXPECT_NE(draw_samples(s, a, 8).evaluation, first.evaluation);
    std::set<std::size_t> eval(first.evaluation.begin(), first.evaluation.end());
    for (std::size_t i : first.ablation) EXPECT_FALSE(eval.count(i));
    std::array<std::size_t, kStratumCount> per{};
    for (std::size_t i : first.evaluation) ++per[s.keys[i].index()];
    for (std::size_t h = 0; h < kStratumCount; ++h) EXPECT_EQ(per[h], a.evaluation[h]);
}

TEST(LoadTasks, ExclusionsAndErrors) {
    std::istringstream in(
        R"({"id":"a","ground_truth":"^a$","positives":["a"],"negatives":["b"],"source":"oss"})" "\n"
        R"({"id":"b","ground_truth":"^a$","positives":[],"negatives":["b"],"source":"oss"})" "\n"
        R"({"id":"c","ground_truth":"^a$","positives":["a"],"negatives":[],"source":"regexlib"})" "\n"
        R"({"id":"d","ground_truth":"(a","positives":["a"],"negatives":["b"],"source":"oss"})" "\n"
        R"j({"id":"e","ground_truth":"(?<n>a)(?(n)a)","positives":["a"],"negatives":["b"],"source":"oss"})j" "\n"
        R"({"id":"f","ground_truth":"a","positives":["a"],"negatives":["b"],"source":"github"})" "\n"
        "garbage\n");
    const TaskLoad load = load_tasks(in);
    ASSERT_EQ(load.tasks.size(), 1u);
    EXPECT_EQ(load.tasks[0].id, "a");
    EXPECT_EQ(load.malformed, 2u);
    ASSERT_EQ(load.excluded.size(), 4u);
    EXPECT_EQ(load.excluded[0].reason, "no-positive");
    EXPECT_EQ(load.excluded[1].reason, "no-negative");
    EXPECT_EQ(load.excluded[2].reason, "parse-error");
    EXPECT_EQ(load.excluded[3].reason, "unsupported");

    std::istringstream dup(R"({"id":"a","ground_truth":"a","positives":["a"],"negatives":["b"],"source":"oss"})" "\n"
                           R"({"id":"a","ground_truth":"b","positives":["b"],"negatives":["a"],"source":"oss"})" "\n");
    EXPECT_THROW(load_tasks(dup), BenchError);
}

TEST(LoadTasks, RoundTrip) {
    const std::vector<CompositionTask> tasks = {task("x", "^\\d+$", {"1", "22"}, {"a"}, TaskSource::RegexLib)};
    std::stringstream buf;
    write_tasks(buf, tasks);
    const TaskLoad load = load_tasks(buf);
    ASSERT_EQ(load.tasks.size(), 1u);
    EXPECT_EQ(load.tasks[0].ground_truth, "^\\d+$");
    EXPECT_EQ(load.tasks[0].positives, tasks[0].positives);
    EXPECT_EQ(load.tasks[0].source, TaskSource::RegexLib);
}

TEST(ReuseStrategy, SolvesWithSynonymAndNeverLeaksGroundTruth) {
    CorpusStore store = CorpusStore::in_memory();
    store.add("^[0-9]+$", CorpusSource::OssProject, "r1");
    store.add("^\\d+$", CorpusSource::RegexLib, "l1");
    store.add("^[a-z]+$", CorpusSource::SoPost, "p1");
    const auto tasks = std::vector{task("digits", "^\\d+$", {"12", "7"}, {"a1", ""})};
    const auto records = run_strategy(ReuseStrategy(store), tasks);
    ASSERT_EQ(records.size(), 1u);
    const TaskRecord& r = records[0];
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.strategy, "reuse-all");
    EXPECT_EQ(r.candidate_patterns, std::vector<std::string>{"^[0-9]+$"});
    EXPECT_EQ(r.candidates[0].semantic_similarity, 1.0);
    EXPECT_TRUE(r.first_success.has_value());
    EXPECT_FALSE(r.per_metric.at("accuracy").variance.has_value());

    const auto internet = run_strategy(ReuseStrategy(store, ReuseMode::Internet), tasks);
    EXPECT_FALSE(internet[0].success);  // the only other digit pattern is the ground truth itself
    EXPECT_EQ(internet[0].strategy, "reuse-internet");
}

TEST(AdapterStrategy, ProtocolAndErrors) {
    const auto tasks = std::vector{task("digits", "^\\d+$", {"12"}, {"a"})};
    const auto ok = run_strategy(AdapterStrategy("fixed", {kAdapters + "echo_candidates.sh"}, std::chrono::seconds(5)), tasks);
    EXPECT_EQ(ok[0].status, TaskStatus::Ok);
    EXPECT_EQ(ok[0].candidates.size(), 2u);
    EXPECT_TRUE(ok[0].success);
    ASSERT_TRUE(ok[0].first_success);
    const std::chrono::duration<double, std::milli> first = *ok[0].first_success;
    EXPECT_NEAR(first.count(), 1.5, 1e-6);
    ASSERT_TRUE(ok[0].per_metric.at("pattern_length").variance);
    EXPECT_EQ(*ok[0].per_metric.at("pattern_length").variance, 2.25);  // lengths 8 and 5

    const auto echo = run_strategy(AdapterStrategy("echo", {kAdapters + "echo_request.sh"}, std::chrono::seconds(10)), tasks);
    EXPECT_EQ(echo[0].status, TaskStatus::Ok);
    EXPECT_EQ(echo[0].invalid_candidates, 1u);
    EXPECT_EQ(echo[0].candidate_patterns, std::vector<std::string>{"^12$"});

    for (const char* script : {"invalid_json.sh", "failing.sh"}) {
        const auto bad = run_strategy(AdapterStrategy("bad", {kAdapters + script}, std::chrono::seconds(5)), tasks);
        EXPECT_EQ(bad[0].status, TaskStatus::StrategyError) << script;
        EXPECT_FALSE(bad[0].success);
        EXPECT_TRUE(bad[0].candidates.empty());
    }
    const auto started = std::chrono::steady_clock::now();
    const auto slow = run_strategy(AdapterStrategy("slow", {kAdapters + "slow.sh"}, std::chrono::milliseconds(300)), tasks);
    EXPECT_LT(std::chrono::steady_clock::now() - started, std::chrono::seconds(5));
    EXPECT_EQ(slow[0].status, TaskStatus::StrategyError);
    EXPECT_EQ(slow[0].error, "adapter timed out");
    const auto missing = run_strategy(AdapterStrategy("missing", {kAdapters + "no_such_adapter"}, std::chrono::seconds(1)), tasks);
    EXPECT_EQ(missing[0].status, TaskStatus::StrategyError);
}

TaskRecord fake(std::string strategy, std::string id, bool success, std::vector<std::size_t> lengths, std::size_t tests) {
    TaskRecord r;
    r.strategy = std::move(strategy);
    r.task_id = std::move(id);
    r.success = success;
    r.test_count = tests;
    r.ground.pattern_length = 4;
    for (std::size_t len : lengths) {
        MetricBundle b;
        b.pattern_length = len;
        b.accuracy = success ? 1.0 : 0.5;
        r.candidates.push_back(b);
        r.candidate_patterns.push_back(std::string(len, 'a'));
    }
    summarize(r);
    return r;
}

TEST(Aggregate, FamiliesAndSuccessRate) {
    std::vector<TaskRecord> records;
    for (int i = 0; i < 10; ++i) records.push_back(fake("s", "t" + std::to_string(i), i != 3, {4, 6}, i < 5 ? 2 : 6));
    records.push_back(fake("other", "t0", false, {5}, 2));
    const BenchReport report = aggregate(records);
    ASSERT_EQ(report.strategies.size(), 2u);
    const StrategyReport& other = report.strategies[0];
    const StrategyReport& s = report.strategies[1];
    EXPECT_EQ(s.strategy, "s");
    EXPECT_DOUBLE_EQ(s.success_rate, 0.9);
    EXPECT_EQ(other.per_task_variance.count("pattern_length"), 0u);  // single candidate
    EXPECT_EQ(s.per_task_mean.at("pattern_length").median, 5.0);
    EXPECT_EQ(s.diff_vs_ground.at("pattern_length").mean, 1.0);
    EXPECT_EQ(s.per_task_variance.at("pattern_length").median, 1.0);
    EXPECT_EQ(s.per_task_mean.at("candidate_count").mean, 2.0);
    ASSERT_EQ(s.success_by_test_count.size(), 2u);
    EXPECT_DOUBLE_EQ(s.success_by_test_count[0].success_rate, 0.8);
    EXPECT_DOUBLE_EQ(s.success_by_test_count[1].success_rate, 1.0);

    std::vector<TaskRecord> shuffled = records;
    std::reverse(shuffled.begin(), shuffled.end());
    EXPECT_EQ(report_json(aggregate(shuffled)), report_json(report));

    std::ostringstream csv;
    write_report_csv(csv, report);
    const std::string text = csv.str();
    EXPECT_EQ(text.rfind("strategy,metric,statistic,value\n", 0), 0u);
    EXPECT_NE(text.find("s,success,rate,0.9\n"), std::string::npos);
    EXPECT_NE(text.find("s,pattern_length_variance,median,1\n"), std::string::npos);
    EXPECT_NE(text.find("s,pattern_length_diff_vs_ground,mean,1\n"), std::string::npos);
}

TEST(Records, JsonRoundTrip) {
    CorpusStore store = CorpusStore::in_memory();
    store.add("^[0-9]+$", CorpusSource::OssProject, "r1");
    const auto records = run_strategy(ReuseStrategy(store), {task("d", "^\\d+$", {"1"}, {"x"})});
    const TaskRecord back = record_from_json(record_json(records[0]));
    EXPECT_EQ(record_json(back), record_json(records[0]));
}

}  // namespace
}  // namespace regex_forge
